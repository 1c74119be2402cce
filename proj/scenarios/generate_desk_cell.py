#!/usr/bin/env python3
"""Writes desk_cell.json: three mobile planar arms carrying a shared object
across the cell while an operator walks in front of them and then leaves.

The tool points start evenly spaced on a circle around the object centroid;
each base is placed so that its arm reaches its tool point at the chosen joint
angles. The nominal path translates the centroid and keeps the formation.
"""

import json
import math
import sys

import numpy as np

BASE_Z = 1.0
CHEST_Z = 1.3
GRIP_RADIUS = 0.35
ARM = (0.5, 0.4, 0.3)
TOOL = 0.45
ARM_Q = np.array([0.6, -1.0, 0.4])
HEADINGS_DEG = (90.0, 210.0, 330.0)
CENTROID0 = np.array([0.0, 0.0])
TRAVEL = np.array([3.0, 0.0])

OPERATOR = [
    (0.0, (9.0, 3.0)),
    (6.0, (9.0, 3.0)),
    (12.0, (5.2, 0.2)),
    (16.0, (4.6, 0.1)),
    (24.0, (3.2, 0.0)),
    (30.0, (9.0, 5.0)),
    (60.0, (9.0, 5.0)),
]


def rot(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s], [s, c]])


def arm_reach(q):
    # Tool position in the base frame for revolute-z joints.
    a1 = q[0]
    a2 = a1 + q[1]
    a3 = a2 + q[2]
    return (ARM[0] * np.array([math.cos(a1), math.sin(a1)])
            + ARM[1] * np.array([math.cos(a2), math.sin(a2)])
            + TOOL * np.array([math.cos(a3), math.sin(a3)]))


def robot(k, heading):
    theta = math.radians(heading)
    yaw = theta + math.pi
    tool_xy = CENTROID0 + GRIP_RADIUS * np.array([math.cos(theta), math.sin(theta)])
    base_xy = tool_xy - rot(yaw) @ arm_reach(ARM_Q)
    q0 = [base_xy[0], base_xy[1], *ARM_Q]
    pose = {"xyz": [0.0, 0.0, BASE_Z], "rpy": [0.0, 0.0, yaw]}
    joints = []
    offset = 0.0
    for length in ARM:
        joints.append({
            "type": "revolute",
            "axis": [0.0, 0.0, 1.0],
            "offset": {"xyz": [offset, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
            "limits": [-math.pi, math.pi],
            "segment": {"start": [0.0, 0.0, 0.0], "end": [length, 0.0, 0.0]},
        })
        offset = length
    x = np.array([tool_xy[0], tool_xy[1], yaw + ARM_Q.sum()])
    spec = {
        "name": f"worker{k + 1}",
        "base": {"kind": "planarHolonomic", "pose": pose},
        "joints": joints,
        "tool": {"xyz": [TOOL, 0.0, 0.0], "rpy": [0.0, 0.0, 0.0]},
        "q0": [float(v) for v in q0],
    }
    return spec, x


def task_vector(xs):
    centroid = sum(xs) / len(xs)
    rel = [xs[i + 1] - xs[i] for i in range(len(xs) - 1)]
    return np.concatenate([centroid, *rel])


def main():
    robots, xs = zip(*(robot(k, h) for k, h in enumerate(HEADINGS_DEG)))
    sigma0 = task_vector(list(xs))
    sigma1 = sigma0.copy()
    sigma1[:2] += TRAVEL
    scenario = {
        "version": 1,
        "name": "desk_cell",
        "robots": list(robots),
        "task": {
            "p": 3,
            "nominalPath": [[float(v) for v in sigma0], [float(v) for v in sigma1]],
            "interpolation": "linear",
            "timing": {"profile": "cubic", "t0": 2.0, "tf": 32.0},
        },
        "operator": {
            "mode": "scripted",
            "spawn": [OPERATOR[0][1][0], OPERATOR[0][1][1], CHEST_Z],
            "waypoints": [{"t": t, "p": [x, y, CHEST_Z]} for t, (x, y) in OPERATOR],
        },
        "gains": {
            "kSigma": 20.0,
            "lambdaSigma": 100.0,
            "kN": 0.02,
            "kDamp": 2.0,
            "lambdaDls": 0.0,
            "kD": 4.5,
            "kP": 5.0,
            "impedance": {"M": 1.0, "D": 6.5, "K": 10.0, "kR": 15.0, "deltaF": 15.0,
                          "epsRecPos": 1e-3, "epsRecVel": 1e-3},
        },
        "safety": {"k1": 1.0, "k2": 1.0, "quadratureNodes": 21, "fMin": 40.0},
        "supervisor": {"tDwell": 0.05, "homeTol": 1e-6},
        "sim": {"dt": 0.001, "duration": 60.0, "seed": 7, "realtimeFactor": 0.0},
    }
    out = sys.argv[1] if len(sys.argv) > 1 else "desk_cell.json"
    with open(out, "w") as f:
        json.dump(scenario, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
