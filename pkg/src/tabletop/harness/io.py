"""JSON scenario, plan and results files."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Optional

from ..geometry import ConvexPolygon, Pose2, WorkspaceRect
from ..world import Action, ObjectClass, ObjectSpec, PickPlace, Push, Scenario, WorldState

FORMAT_VERSION = 1


def _pose(p: Pose2) -> dict:
    return {"x": p.x, "y": p.y, "theta": p.theta}


def _parse_pose(d: dict) -> Pose2:
    return Pose2(float(d["x"]), float(d["y"]), float(d["theta"]))


def scenario_to_dict(sc: Scenario, extra: Optional[dict] = None) -> dict:
    d = {
        "version": FORMAT_VERSION,
        "id": sc.name,
        "workspace": {"width": sc.ws.width, "height": sc.ws.height},
        "objects": [{"id": o.id, "vertices": [list(v) for v in o.footprint.vertices], "class": o.cls.value}
                    for o in sc.objects],
        "start": [{"id": i, **_pose(p)} for i, p in enumerate(sc.start.poses)],
        "goal": [{"id": i, **_pose(p)} for i, p in enumerate(sc.goal.poses)],
    }
    if extra:
        d.update(extra)
    return d


def scenario_from_dict(d: dict) -> Scenario:
    if d.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported scenario format version {d.get('version')!r}")
    ws = WorkspaceRect(float(d["workspace"]["width"]), float(d["workspace"]["height"]))
    objects = tuple(sorted((ObjectSpec(int(o["id"]), ConvexPolygon(tuple(tuple(v) for v in o["vertices"])),
                                       ObjectClass(o["class"])) for o in d["objects"]), key=lambda o: o.id))
    start = WorldState.from_mapping({int(e["id"]): _parse_pose(e) for e in d["start"]})
    goal = WorldState.from_mapping({int(e["id"]): _parse_pose(e) for e in d["goal"]})
    return Scenario(objects, start, goal, ws, str(d.get("id", "")))


def action_to_dict(a: Action) -> dict:
    if isinstance(a, PickPlace):
        return {"type": "pick_place", "id": a.obj, "pick": _pose(a.pick), "place": _pose(a.place)}
    return {"type": "push", "id": a.obj, "waypoints": [_pose(w) for w in a.waypoints]}


def action_from_dict(d: dict) -> Action:
    if d["type"] == "pick_place":
        return PickPlace(int(d["id"]), _parse_pose(d["pick"]), _parse_pose(d["place"]))
    if d["type"] == "push":
        return Push(int(d["id"]), tuple(_parse_pose(w) for w in d["waypoints"]))
    raise ValueError(f"unknown action type {d['type']!r}")


def plan_to_dict(plan: Iterable[Action], scenario_id: str, solved: bool, stats: Optional[dict] = None) -> dict:
    return {"version": FORMAT_VERSION, "scenario_id": scenario_id,
            "actions": [action_to_dict(a) for a in plan], "solved": bool(solved), "stats": stats or {}}


def plan_from_dict(d: dict) -> tuple[list[Action], dict]:
    if d.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported plan format version {d.get('version')!r}")
    return [action_from_dict(a) for a in d["actions"]], d


def write_json(obj: Any, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def read_json(path) -> Any:
    return json.loads(Path(path).read_text())


def save_scenario(sc: Scenario, path, extra: Optional[dict] = None) -> None:
    write_json(scenario_to_dict(sc, extra), path)


def load_scenario(path) -> Scenario:
    return scenario_from_dict(read_json(path))


def save_plan(plan, path, scenario_id: str, solved: bool, stats: Optional[dict] = None) -> None:
    write_json(plan_to_dict(plan, scenario_id, solved, stats), path)


def load_plan(path) -> tuple[list[Action], dict]:
    return plan_from_dict(read_json(path))


def suite_files(directory) -> list[Path]:
    """Scenario files in a suite directory (plan and witness files excluded)."""
    return sorted(p for p in Path(directory).glob("*.json")
                  if not p.name.endswith((".witness.json", ".plan.json")))
