from .builders import Scenario, builtin_scenarios
from .runtime import (
    SIM_DATE,
    VARIANTS,
    build_minds,
    event_brief,
    export_scenario,
    get_scenario,
    load_scenario,
    make_header,
    run_scenario,
    seed_knowledge,
)
from .script import scripted_backend

__all__ = [
    "Scenario",
    "SIM_DATE",
    "VARIANTS",
    "build_minds",
    "builtin_scenarios",
    "event_brief",
    "export_scenario",
    "get_scenario",
    "load_scenario",
    "make_header",
    "run_scenario",
    "scripted_backend",
    "seed_knowledge",
]
