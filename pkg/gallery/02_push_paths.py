"""RRT-connect push paths for a box that cannot be lifted.

The box sits inside a cup that opens to the left, and its goal lies behind
the cup's back wall. A straight push is blocked, so the planner must leave
through the opening. The scene is written to gallery_out/push_path.svg.

Run: python3 gallery/02_push_paths.py
"""
from pathlib import Path

import numpy as np

from tabletop.geometry import ConvexPolygon, Pose2
from tabletop.harness import render_svg, validate_plan
from tabletop.motion import MotionConfig, path_length, rrt_connect
from tabletop.world import ObjectClass, ObjectSpec, Push, Scenario, WorldState

out = Path("gallery_out")
out.mkdir(exist_ok=True)

box = ConvexPolygon.rectangle(0.05, 0.05)
wall = ConvexPolygon.rectangle(0.02, 0.30)
lid = ConvexPolygon.rectangle(0.20, 0.02)
objects = [ObjectSpec(0, box, ObjectClass.PUSH_ONLY),
           ObjectSpec(1, wall, ObjectClass.PUSH_ONLY),
           ObjectSpec(2, lid, ObjectClass.PUSH_ONLY),
           ObjectSpec(3, lid, ObjectClass.PUSH_ONLY)]
start = WorldState((Pose2(0.38, 0.26, 0), Pose2(0.45, 0.26, 0), Pose2(0.335, 0.40, 0), Pose2(0.335, 0.12, 0)))
goal = start.moved(0, Pose2(0.62, 0.26, 0.8))
sc = Scenario(objects, start, goal, name="cup")

obstacles = [(o.footprint, start[o.id]) for o in objects[1:]]
path = rrt_connect(box, start[0], goal[0], obstacles, sc.ws,
                   MotionConfig(time_limit=2.0, max_nodes=20000), np.random.default_rng(0))
print(f"{len(path)} waypoints, length {path_length(path):.3f} m "
      f"(straight line {start[0].xy_distance(goal[0]):.3f} m)")

plan = [Push(0, tuple(path))]
print("validator:", validate_plan(sc, plan))
print("wrote", render_svg(sc, out / "push_path.svg", plan=plan))
