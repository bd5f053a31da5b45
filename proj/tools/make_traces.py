#!/usr/bin/env python3
"""Regenerates the bundled session traces in assets/traces."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "assets" / "traces"


def ev(t, addr, *args):
    return {"t_ms": t, "addr": addr, "args": list(args)}


def threat_ramp():
    # A knight approaches the village: threat and the knight's activation climb
    # together while the village stays lit; a bandit shows up halfway.
    out = [
        ev(0, "/ams/theme", "village", "0"),
        ev(0, "/ams/theme", "knight", "1"),
        ev(0, "/ams/activate", "village", "object", 80, "set"),
        ev(0, "/ams/activate", "square", "environment", 60, "set"),
        ev(0, "/ams/affect", "happiness", 55, "set"),
        ev(0, "/ams/edge", "knight", "threat", 0.8),
        ev(0, "/ams/edge", "village", "happiness", 0.6),
    ]
    for t in range(2000, 60001, 2000):
        level = round(100.0 * t / 60000.0, 3)
        out.append(ev(t, "/ams/affect", "threat", level, "set"))
        out.append(ev(t, "/ams/activate", "knight", "object", level, "set"))
    out.append(ev(30000, "/ams/activate", "bandit", "object", 40, "set"))
    out.append(ev(30000, "/ams/edge", "bandit", "knight", 0.7))
    out.append(ev(30000, "/ams/edge", "bandit", "village", 0.3))
    out.sort(key=lambda e: e["t_ms"])
    return out


def sadness_plateau():
    out = [
        ev(0, "/ams/theme", "graveyard", "2"),
        ev(0, "/ams/activate", "graveyard", "object", 70, "set"),
        ev(0, "/ams/activate", "fog", "environment", 50, "set"),
        ev(0, "/ams/edge", "graveyard", "sadness", 0.9),
    ]
    for t in range(0, 60001, 5000):
        out.append(ev(t, "/ams/affect", "sadness", 90, "set"))
    out.sort(key=lambda e: e["t_ms"])
    return out


def happiness_plateau():
    out = [
        ev(0, "/ams/theme", "village", "0"),
        ev(0, "/ams/theme", "market", "7"),
        ev(0, "/ams/activate", "village", "object", 70, "set"),
        ev(0, "/ams/edge", "village", "market", 0.5),
    ]
    for t in range(0, 60001, 5000):
        out.append(ev(t, "/ams/affect", "happiness", 90, "set"))
        out.append(ev(t, "/ams/affect", "excitement", 60, "set"))
    out.append(ev(20000, "/ams/activate", "market", "object", 90, "set"))
    out.sort(key=lambda e: e["t_ms"])
    return out


def mixed_session():
    # Exploration, a tavern visit, a dungeon fight, and a couple of malformed
    # messages the engine must reject without stopping.
    out = [
        ev(0, "/ams/theme", "forest", "3"),
        ev(0, "/ams/theme", "tavern", "5"),
        ev(0, "/ams/theme", "dungeon", "6"),
        ev(0, "/ams/theme", "hero", "4"),
        ev(0, "/ams/activate", "forest", "environment", 70, "set"),
        ev(0, "/ams/activate", "hero", "object", 60, "set"),
        ev(0, "/ams/affect", "tenderness", 60, "set"),
        ev(8000, "/ams/activate", "tavern", "object", 85, "set"),
        ev(8000, "/ams/affect", "happiness", 70, "set"),
        ev(8000, "/ams/edge", "tavern", "hero", 0.4),
        ev(12000, "/ams/volume", 0.5),
        ev(20000, "/ams/activate", "dungeon", "object", 95, "set"),
        ev(20000, "/ams/affect", "threat", 60, "set"),
        ev(20000, "/ams/affect", "anger", 40, "set"),
        ev(24000, "/ams/edge", "threat", "anger", 0.5),
        ev(26000, "/ams/activate", "skeleton", "object", 80, "set"),
        ev(26000, "/ams/edge", "skeleton", "dungeon", 0.9),
        ev(32000, "/ams/affect", "excitement", 20, "add"),
        ev(32000, "/ams/affect", "excitement", 20, "add"),
        ev(40000, "/ams/activate", "forest", "environment", 90, "set"),
        ev(40000, "/ams/affect", "sadness", 50, "set"),
    ]
    return out


def write(name, events):
    path = OUT / f"{name}.jsonl"
    with path.open("w") as f:
        for e in events:
            f.write(json.dumps(e, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("threat_ramp", threat_ramp())
    write("sadness_plateau", sadness_plateau())
    write("happiness_plateau", happiness_plateau())
    write("mixed_session", mixed_session())
