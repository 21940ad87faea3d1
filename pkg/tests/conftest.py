"""Shared helpers: corpus locations and a parse/resolve/check pipeline."""

from __future__ import annotations

from pathlib import Path

import pytest

from maa.checks import check
from maa.parser import parse_component_file, parse_types_file
from maa.resolution import resolve
from maa.syntax import CompilationUnit, TypeDeclUnit

REPO_ROOT = Path(__file__).resolve().parent.parent
MODELS = REPO_ROOT / "models"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

# The example-model corpus: (model files, profile, type files).
CORPUS = {
    "bump_control": ([MODELS / "bumperbot" / "BumpControl.maa"], "ts",
                     [MODELS / "bumperbot" / "types" / "commands.types"]),
    "follow_the_leader": ([MODELS / "robot" / "FollowTheLeaderOnline.maa"], "ts",
                          [MODELS / "robot" / "enums.types"]),
    "toast_arm": ([MODELS / "robot" / "ToastArmController.maa"], "ed",
                  [MODELS / "robot" / "enums.types"]),
    "pipeline": (sorted((MODELS / "pipeline").glob("*.maa")), "ts", []),
}
for _path in sorted((MODELS / "reference").glob("*.maa")):
    CORPUS[f"reference_{_path.stem}"] = ([_path], "generic", [])


def parse_model(path: Path) -> CompilationUnit:
    result = parse_component_file(path.read_text(encoding="utf-8"), str(path))
    assert isinstance(result, CompilationUnit), f"{path} did not parse: {result}"
    return result


def parse_types(path: Path) -> TypeDeclUnit:
    result = parse_types_file(path.read_text(encoding="utf-8"), str(path))
    assert isinstance(result, TypeDeclUnit), f"{path} did not parse: {result}"
    return result


def load_model(paths, type_paths=()):
    """Parse and resolve; asserts zero resolution diagnostics."""
    units = [parse_model(Path(p)) for p in paths]
    tunits = [parse_types(Path(p)) for p in type_paths]
    model, diags = resolve(units, tunits)
    assert diags == [], [d.render() for d in diags]
    return model


def check_files(paths, profile, type_paths=()):
    """Full pipeline: parse, resolve, check; returns merged diagnostics."""
    units = [parse_model(Path(p)) for p in paths]
    tunits = [parse_types(Path(p)) for p in type_paths]
    model, rdiags = resolve(units, tunits)
    return rdiags + check(model, profile)


@pytest.fixture
def bump_model():
    return load_model([MODELS / "bumperbot" / "BumpControl.maa"],
                      [MODELS / "bumperbot" / "types" / "commands.types"])


@pytest.fixture
def follow_model():
    return load_model([MODELS / "robot" / "FollowTheLeaderOnline.maa"],
                      [MODELS / "robot" / "enums.types"])


@pytest.fixture
def toast_model():
    return load_model([MODELS / "robot" / "ToastArmController.maa"],
                      [MODELS / "robot" / "enums.types"])


@pytest.fixture
def pipeline_model():
    return load_model(sorted((MODELS / "pipeline").glob("*.maa")))


@pytest.fixture
def arbiter_model():
    return load_model([MODELS / "reference" / "Arbiter.maa"])
