from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from teamsim.scenario import builtin_scenario, parse_scenario

FIXTURES = Path(__file__).parent / "fixtures"

MINIMAL_DOC = """\
format_version: 1
id: minimal
seed: 0
max_steps: 10
env:
  width: 8
  height: 8
  num_regions: 1
members:
  - name: Scout
    role: Searcher
goal:
  statement: Nothing can be done.
  predicate: always_false
"""

# One room, one victim, one transporter: every step of the run is hand
# traceable, which is what the engine trace oracle tests rely on.
SOLO_RESCUE_DOC = """\
format_version: 1
id: solo-rescue
seed: 3
max_steps: 200
env:
  width: 8
  height: 8
  num_regions: 1
  region_names: [Hospital]
members:
  - name: Riley
    role: Transporter
goal:
  statement: Bring the victim to the Hospital bay.
  predicate:
    entity_in_region: {entity: patient, region: Hospital}
entities:
  - name: patient
    kind: victim
    interactive: true
"""

TWO_ROOM_DOC = """\
format_version: 1
id: two-room
seed: 11
max_steps: 400
env:
  width: 16
  height: 8
  num_regions: 2
  region_names: [Hospital, Ward]
members:
  - name: Riley
    role: Transporter
    trust_level: high
  - name: Sam
    role: Medic
    trust_level: high
goal:
  statement: Every victim rests in the Hospital.
  predicate:
    all_entities_in_region: {kind: victim, region: Hospital}
entities:
  - name: victim-a
    kind: victim
    interactive: true
    region: Ward
    attributes: {severity: critical}
"""


@pytest.fixture(scope="session")
def rescue_scenario():
    return builtin_scenario()


@pytest.fixture()
def minimal_scenario():
    return parse_scenario(MINIMAL_DOC)


@pytest.fixture()
def solo_rescue_scenario():
    return parse_scenario(SOLO_RESCUE_DOC)


@pytest.fixture()
def two_room_scenario():
    return parse_scenario(TWO_ROOM_DOC)
