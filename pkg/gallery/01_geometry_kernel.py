"""Poses, convex footprints and the separating-axis overlap test.

Run: python3 gallery/01_geometry_kernel.py
"""
import math

from tabletop.geometry import ConvexPolygon, Pose2, WorkspaceRect, inside_workspace, overlap, path_clear, transform

ws = WorkspaceRect()          # 0.78 m x 0.52 m table
box = ConvexPolygon.rectangle(0.10, 0.06)
wedge = ConvexPolygon.from_points([(0, 0), (0.08, 0), (0, 0.05)])
print("box area", box.area, "circumradius", round(box.circumradius, 4))

# A pose is (x, y, theta); theta is wrapped into (-pi, pi].
p = Pose2(0.3, 0.2, 3 * math.pi / 2)
print("wrapped theta", round(p.theta, 4))
print("box corners at p:\n", transform(box, p).round(3))

# Touching edges do not count as overlap; any positive-area intersection does.
a, b = Pose2(0.2, 0.2, 0), Pose2(0.3, 0.2, 0)
print("touching:", overlap(box, a, box, b))
print("shifted 1 mm:", overlap(box, a, box, Pose2(0.299, 0.2, 0)))
print("wedge vs box:", overlap(wedge, Pose2(0.25, 0.22, 0.3), box, a))

print("inside table:", inside_workspace(box, Pose2(0.05, 0.03, 0), ws))
print("hanging off:", inside_workspace(box, Pose2(0.04, 0.03, 0), ws))

# Swept checks interpolate a waypoint path and test every sample.
wall = (ConvexPolygon.rectangle(0.02, 0.3), Pose2(0.4, 0.26, 0))
straight = [Pose2(0.1, 0.26, 0), Pose2(0.7, 0.26, 0)]
around = [Pose2(0.1, 0.26, 0), Pose2(0.1, 0.47, 0), Pose2(0.7, 0.47, 0), Pose2(0.7, 0.26, 0)]
print("straight through the wall:", path_clear(box, straight, [wall], ws))
print("around the wall:", path_clear(box, around, [wall], ws))
