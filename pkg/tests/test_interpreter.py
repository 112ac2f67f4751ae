import io

import pytest

from mlworkbench.interpreter import (
    Answer,
    RegistryError,
    SlotRule,
    answer_boolean,
    answer_span,
    default_registry,
    interpret,
    load_registry,
    resolve_key,
    resolve_key_trace,
    SlotRegistry,
)

CASE1 = "I want to perform a clustering using 3 clusters on the iris dataset."
CASE3 = ("Perform a classification of the iris dataset. I want this request "
         "to be reproducible. Test [4.8,3.0,1.4,0.2] value.")


@pytest.fixture(scope="module")
def registry():
    return default_registry()


# --- registry loading -------------------------------------------------------

def test_load_registry_rows():
    src = io.StringIO(
        "Key,Type,Return value,Questions\n"
        "PROBLEM,Y/N,CLUSTERING,Is this clustering?\n"
        "DATASET,Std.,,What is the dataset?\n")
    reg = load_registry(src)
    assert len(reg) == 2
    assert reg.rules[0] == SlotRule("PROBLEM", "boolean", "CLUSTERING",
                                    "Is this clustering?")
    assert reg.rules[1] == SlotRule("DATASET", "span", "",
                                    "What is the dataset?")


def test_load_registry_preserves_order(registry):
    questions = [r.question for r in registry.rules_for("NB_CLST")]
    assert questions == ["How many groups?", "How many clusters?"]


def test_load_registry_empty_stream():
    with pytest.raises(RegistryError, match="registry has no rules"):
        load_registry(io.StringIO(""))
    with pytest.raises(RegistryError, match="registry has no rules"):
        load_registry(io.StringIO("Key,Type,Return value,Questions\n"))


def test_load_registry_bad_row_names_line():
    src = io.StringIO(
        "Key,Type,Return value,Questions\n"
        "PROBLEM,Y/N,CLUSTERING\n")
    with pytest.raises(RegistryError, match="line 2"):
        load_registry(src)


def test_load_registry_unknown_type_token():
    src = io.StringIO(
        "Key,Type,Return value,Questions\n"
        "PROBLEM,Maybe,CLUSTERING,Is this clustering?\n")
    with pytest.raises(RegistryError, match="unknown Type token"):
        load_registry(src)


def test_slot_rule_invariants():
    with pytest.raises(RegistryError):
        SlotRule("PROBLEM", "boolean", "", "Is this clustering?")
    with pytest.raises(RegistryError):
        SlotRule("DATASET", "span", "IRIS", "What is the dataset?")
    with pytest.raises(RegistryError):
        SlotRule("DATASET", "span", "", "")


# --- span answers ------------------------------------------------------------

def test_answer_span_dataset():
    ans = answer_span("What is the dataset?", CASE1)
    assert ans.text == "iris"
    assert ans.confidence > 0


def test_answer_span_groups_has_no_answer():
    assert answer_span("How many groups?", CASE1) is None


def test_answer_span_clusters():
    ans = answer_span("How many clusters?", CASE1)
    assert ans.text == "3"
    assert ans.confidence > 0


def test_answer_span_test_vector_verbatim():
    ans = answer_span("What are the test values?", CASE3)
    assert ans.text == "[4.8,3.0,1.4,0.2]"


def test_answer_span_no_pattern():
    assert answer_span("What is the dataset?", "cluster the data please") is None


# --- boolean answers ---------------------------------------------------------

def test_answer_boolean_yes_no():
    assert answer_boolean("Is this clustering?", CASE1).text == "yes"
    assert answer_boolean("Is this about classification?", CASE1).text == "no"


def test_answer_boolean_empty_command():
    ans = answer_boolean("Is this clustering?", "")
    assert ans == Answer("no", 0.0)


def test_answer_boolean_confidence_in_bounds():
    ans = answer_boolean("Is this clustering?", CASE1)
    assert 0.0 < ans.confidence <= 1.0


# --- key resolution ----------------------------------------------------------

def test_resolve_problem(registry):
    value, confidence = resolve_key("PROBLEM", CASE1, registry)
    assert value == "CLUSTERING"
    assert confidence > 0


def test_resolve_nb_clst(registry):
    value, _ = resolve_key("NB_CLST", CASE1, registry)
    assert value == "3"


def test_resolve_nb_cmps_absent(registry):
    assert resolve_key("NB_CMPS", CASE1, registry) is None


def test_resolve_unknown_key(registry):
    with pytest.raises(RegistryError, match="key not in registry"):
        resolve_key("NOPE", CASE1, registry)


def test_boolean_resolution_returns_rule_value_not_yes(registry):
    value, _ = resolve_key("PROBLEM", CASE1, registry)
    assert value not in ("yes", "no")


def test_table_trace_problem(registry):
    best, trace = resolve_key_trace("PROBLEM", CASE1, registry)
    answers = [ans.text for _rule, ans in trace[:5]]
    assert answers == ["no", "no", "no", "no", "yes"]
    assert trace[4][0].question == "Is this clustering?"
    assert best[0] == "CLUSTERING"


def test_table_trace_nb_clst(registry):
    _, trace = resolve_key_trace("NB_CLST", CASE1, registry)
    assert trace[0][1] is None
    assert trace[1][1].text == "3"


# --- interpret ---------------------------------------------------------------

def test_interpret_case1(registry):
    frame = interpret(CASE1, registry, ["PROBLEM", "DATASET", "NB_CLST"])
    assert frame.values() == {"PROBLEM": "CLUSTERING", "DATASET": "iris",
                              "NB_CLST": "3"}
    assert frame.unresolved == set()


def test_interpret_empty_command(registry):
    frame = interpret("", registry, ["PROBLEM", "DATASET", "NB_CLST"])
    assert frame.bindings == {}
    assert frame.unresolved == {"PROBLEM", "DATASET", "NB_CLST"}


def test_interpret_case3(registry):
    frame = interpret(CASE3, registry, ["PROBLEM", "DATASET"],
                      ["RANDOM", "TEST"])
    assert frame.values() == {
        "PROBLEM": "CLASSIFICATION",
        "DATASET": "iris",
        "RANDOM": "REPRODUCTIBLE",
        "TEST": "[4.8,3.0,1.4,0.2]",
    }


def test_interpret_requires_problem_first(registry):
    with pytest.raises(ValueError, match="PROBLEM"):
        interpret(CASE1, registry, ["DATASET", "PROBLEM"])


def test_interpret_deterministic(registry):
    a = interpret(CASE1, registry, ["PROBLEM", "DATASET", "NB_CLST"])
    b = interpret(CASE1, registry, ["PROBLEM", "DATASET", "NB_CLST"])
    assert a.bindings == b.bindings
    assert a.unresolved == b.unresolved


def test_registry_monotonicity(registry):
    """An unrelated rule must not change the resolution of other keys."""
    extended = SlotRegistry(registry.rules + [
        SlotRule("OTHER", "span", "", "What is the other thing?")])
    for key in ("PROBLEM", "DATASET", "NB_CLST"):
        assert resolve_key(key, CASE1, registry) == \
            resolve_key(key, CASE1, extended)
