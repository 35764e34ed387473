import shutil
import sys
from pathlib import Path
from types import SimpleNamespace

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from patchjudge.corpus import CorpusStore
from patchjudge.model import BugRecord


def make_diff(path: str = "src/widget.h", token: str = "count_", value: str = "0") -> str:
    return (
        f"--- a/{path}\n"
        f"+++ b/{path}\n"
        "@@ -10,3 +10,4 @@\n"
        " class Widget {\n"
        f"+  int {token} = {value};\n"
        "   int total_;\n"
        " };\n"
    )


def make_bug(i: int = 1, bug_type: str = "use_of_uninitialized_value") -> BugRecord:
    return BugRecord(
        bug_id=f"bug-{i:03d}",
        bug_type=bug_type,
        language="c++",
        description=(
            f"Sanitizer reports a {bug_type} in Widget: member count_ is read "
            "before any constructor assigns it."
        ),
        failing_test="//widget:widget_test",
        repro_command=f"run_test --sanitizer //widget:widget_test#{i}",
        ground_truth_patch=make_diff(),
        metadata={"priority": "P1"},
    )


@pytest.fixture
def store(tmp_path) -> CorpusStore:
    return CorpusStore.create(tmp_path / "corpus")


@pytest.fixture(scope="session")
def reference_corpus(tmp_path_factory):
    """The shipped reference corpus, fully processed. Treat as read-only."""
    from patchjudge.fixtures import build_reference_corpus, run_reference_pipeline

    root = tmp_path_factory.mktemp("reference") / "corpus"
    fixture = build_reference_corpus(root)
    result = run_reference_pipeline(root)
    return SimpleNamespace(
        fixture=fixture,
        store=result["store"],
        root=root,
        runs=result["runs"],
    )


@pytest.fixture
def fresh_reference(reference_corpus, tmp_path):
    """A private mutable copy of the processed reference corpus."""
    root = tmp_path / "corpus-copy"
    shutil.copytree(reference_corpus.root, root)
    return SimpleNamespace(store=CorpusStore.open(root), root=root)
