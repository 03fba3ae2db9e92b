import os
import pathlib

import pytest

import texterial

DATA = pathlib.Path(os.environ.get("TEXTERIAL_TEST_DATA_DIR", pathlib.Path(__file__).resolve().parents[1]))


def test_press_squeezes_and_undo_restores():
    s = texterial.Session("a duck story").at(10)
    block = s.add_block("The old house stood.", 0, 0)
    before = s.hash
    result = s.gesture("Press", [(36, 8, 10), (36, 8, 610)])
    assert result["ok"]
    assert s.state()["blocks"][block]["text"] == "THE OLD house stood."
    s.undo()
    assert s.hash == before
    s.redo()
    assert [r["event"]["type"] for r in s.trace()] == ["add_block", "gesture", "undo", "redo"]


def test_garden_grows_on_the_scripted_clock():
    s = texterial.Session()
    planted = s.gesture("PlantPress", [(300, 900, 0), (300, 900, 800)], payload={"seed": "duck names", "dimension": "playful"})
    fern = planted["data"]["fern_id"]
    for k in range(1, 4):
        s.at((k - 1) * 45000)
        assert [r["event"] for r in s.tick()] == ["fern_grown"]
        assert len(s.state()["ferns"][fern]["leaves"]) == 2 * k


def test_prompt_building_and_errors():
    p = texterial.build_prompt("FullBlend", firstText="a.", secondText="b.", intensity=0.97)
    assert (DATA / "golden" / "full_blend.txt").read_text() != ""
    assert "a." in p and "b." in p
    with pytest.raises(RuntimeError, match="MissingSlot"):
        texterial.build_prompt("FullBlend", firstText="a.")
    assert texterial.parse_marked("The <<squeeze>>old<</squeeze>> house") == "The old house"


def test_demo_trace_replays(tmp_path):
    report = texterial.replay(DATA / "data" / "demo_trace.jsonl", DATA / "data" / "demo_seed.json", strict=True)
    again = texterial.replay(DATA / "data" / "demo_trace.jsonl", DATA / "data" / "demo_seed.json", strict=True)
    assert report["final_hash"] == again["final_hash"]
    assert report["verified"] == report["records"] > 0


def test_canonical_hash_ignores_key_order():
    assert texterial.canonical_hash({"b": 1, "a": 2.5}) == texterial.canonical_hash({"a": 2.5, "b": 1})
