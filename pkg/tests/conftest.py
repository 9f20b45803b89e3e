import json
from pathlib import Path

import pytest

from ntrl.content.loader import default_pack_path, load_default_pack
from ntrl.sim.combat import Party, PartyMember


@pytest.fixture(scope="session")
def pack():
    return load_default_pack()


@pytest.fixture(scope="session")
def pack_path():
    return default_pack_path()


@pytest.fixture()
def party4(pack):
    return Party(tuple(PartyMember.fresh(pack.pc_templates[t])
                       for t in ("fighter", "wizard", "cleric", "rogue")))


def copy_pack_files(src: Path, dst: Path) -> None:
    dst.mkdir(parents=True, exist_ok=True)
    for name in ("monsters.json", "pc_templates.json", "spells.json", "xp_tables.json"):
        (dst / name).write_text((src / name).read_text())


def edit_json(path: Path, fn) -> None:
    doc = json.loads(path.read_text())
    fn(doc)
    path.write_text(json.dumps(doc))
