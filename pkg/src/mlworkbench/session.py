"""Request lifecycle orchestration.

One session owns the registry, the request ledger and the energy model.
A command travels through interpretation, follow-up questions for the
missing keys, dataset resolution (with schema elicitation when needed),
the footprint gate, engine dispatch under emission tracking, and finally
explanation-bundle generation.  Every user-visible step is emitted as a
SessionEvent so the terminal REPL and the network API drive the exact
same code path.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import curves as curves_mod
from . import network
from .cluster import kmeans
from .dataset import (
    DatasetError,
    apply_schema,
    elicit_schema,
    read_raw_csv,
    resolve_dataset,
    split,
)
from .decomposition import pca
from .dialogue import Dialogue, ScriptedDialogue, ScriptExhausted, StdioDialogue
from .explain import (
    explain_clustering,
    explain_importance,
    explain_pca,
    explain_supervised,
    write_bundle,
)
from .footprint import gate_lines, predict_footprint, similar_requests
from .forest import rf_importance
from .interpreter import (
    PROBLEM_VOCABULARY,
    CommandFrame,
    SlotRegistry,
    default_registry,
    interpret,
    load_registry,
    resolve_key,
)
from .ledger import EnergyModel, Ledger, LedgerWriteError, track
from .network import NetConfig

EVENT_KINDS = ("prompt", "info", "question", "estimate", "confirm",
               "result", "error")

COMMAND_PROMPT = "Please, enter your English command to the framework"
NO_PROBLEM_MESSAGE = ("No problem to resolve has been found in your text. "
                      "Please clearly identify the type of problem to solve.")

ALGORITHM_NAMES = {
    "CLUSTERING": "kmeans",
    "DIMENSIONALITY": "pca",
    "CLASSIFICATION": "mlp_classifier",
    "PREDICTION": "mlp_regressor",
    "FEAT_IMP": "random_forest",
}

KEY_PROMPTS = {
    "DATASET": "Which dataset should be used?",
    "NB_CLST": "How many clusters do you want?",
    "NB_CMPS": "How many components do you want?",
    "TEST": "Which values should be tested (e.g. [1.0,2.0])?",
    "RANDOM": "Should the request be RANDOM or REPRODUCTIBLE?",
}

_VECTOR_RE = re.compile(
    r"^\[\s*[-+]?\d+(?:\.\d+)?(?:\s*,\s*[-+]?\d+(?:\.\d+)?)*\s*\]$")

TRAIN_CONFIG = NetConfig()
CURVES_CONFIG = NetConfig(max_epochs=150)
SPLIT_RATIO = 0.8


class SessionError(RuntimeError):
    pass


# --- configuration -----------------------------------------------------------

@dataclass
class ServiceConfig:
    data_dir: Path
    out_dir: Path
    ledger_path: Path
    registry_path: Optional[Path] = None
    algorithms_path: Optional[Path] = None
    ui_dir: Optional[Path] = None       # chat client assets, served at /ui
    cpu_power_w: float = 65.0
    carbon_intensity_kg_per_kwh: float = 0.475
    host: str = "127.0.0.1"
    port: int = 8765
    auto_confirm: bool = False


def load_config(path) -> ServiceConfig:
    """Read a JSON config file; relative paths resolve against its folder."""
    path = Path(path)
    if not path.exists():
        raise SessionError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SessionError(f"config file is not valid JSON: {exc}") from exc

    base = path.parent

    def _path(key, default=None):
        if key not in raw:
            return default
        return (base / raw[key]).resolve()

    known = {"data_dir", "out_dir", "ledger_path", "registry_path",
             "algorithms_path", "ui_dir", "cpu_power_w",
             "carbon_intensity_kg_per_kwh", "host", "port", "auto_confirm"}
    unknown = set(raw) - known
    if unknown:
        raise SessionError(f"unknown config keys: {sorted(unknown)}")

    return ServiceConfig(
        data_dir=_path("data_dir", (base / "data").resolve()),
        out_dir=_path("out_dir", (base / "out").resolve()),
        ledger_path=_path("ledger_path", (base / "requests.jsonl").resolve()),
        registry_path=_path("registry_path"),
        algorithms_path=_path("algorithms_path"),
        ui_dir=_path("ui_dir"),
        cpu_power_w=float(raw.get("cpu_power_w", 65.0)),
        carbon_intensity_kg_per_kwh=float(
            raw.get("carbon_intensity_kg_per_kwh", 0.475)),
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8765)),
        auto_confirm=bool(raw.get("auto_confirm", False)),
    )


@dataclass
class AlgorithmSpec:
    problem: str
    required: list
    optional: list = field(default_factory=list)
    defaults: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.required[:2] != ["PROBLEM", "DATASET"]:
            raise SessionError(
                f"{self.problem}: required keys must start with PROBLEM, DATASET")


def load_algorithm_specs(path=None) -> dict:
    """The problem table: required/optional keys and defaults per problem."""
    if path is None:
        text = resources.files("mlworkbench.assets").joinpath(
            "algorithms.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    specs = {}
    for problem, entry in raw.items():
        if problem not in PROBLEM_VOCABULARY:
            raise SessionError(f"unknown problem {problem!r} in algorithm table")
        specs[problem] = AlgorithmSpec(
            problem=problem,
            required=list(entry["required"]),
            optional=list(entry.get("optional", [])),
            defaults=dict(entry.get("defaults", {})),
        )
    return specs


def validate_registry_covers(registry: SlotRegistry, specs: dict) -> None:
    keys = registry.keys()
    for spec in specs.values():
        for key in list(spec.required) + list(spec.optional):
            if key not in keys:
                raise SessionError(
                    f"registry has no rule for key {key} "
                    f"(needed by {spec.problem})")


# --- events --------------------------------------------------------------------

@dataclass
class SessionEvent:
    seq: int
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload}


# --- frame resolution ------------------------------------------------------------

def frame_for_command(command: str, registry: SlotRegistry,
                      specs: dict) -> CommandFrame:
    """Two-phase interpretation: find the problem, then its full key set.

    No prompting happens here; unresolved keys stay in frame.unresolved.
    Used by the `interpret` CLI command and the golden tests.
    """
    first = interpret(command, registry, ["PROBLEM", "DATASET"])
    problem = first.value("PROBLEM")
    if problem is None:
        return first
    spec = specs[problem]
    return interpret(command, registry, spec.required, spec.optional)


def parse_vector(text: str) -> list:
    if not _VECTOR_RE.match(text.strip()):
        raise ValueError(f"not a bracketed numeric vector: {text!r}")
    return [float(v) for v in text.strip().strip("[]").split(",")]


# --- engine dispatch ---------------------------------------------------------------

def dispatch(frame: CommandFrame, parts, seed: Optional[int],
             seed_policy: str) -> dict:
    """Run the engine selected by the frame's PROBLEM over the split data.

    Unsupervised problems consume the full dataset; supervised ones train
    on the train part, score on the held-out part and cross-validate for
    the curves.  Returns the raw engine outcome plus a summary.
    """
    problem = frame.value("PROBLEM")
    prepared = parts.full
    missing = [k for k in ("PROBLEM", "DATASET") if k not in frame]
    if problem == "CLUSTERING" and "NB_CLST" not in frame:
        missing.append("NB_CLST")
    if problem == "DIMENSIONALITY" and "NB_CMPS" not in frame:
        missing.append("NB_CMPS")
    if missing:
        raise SessionError(f"frame is missing required keys: {missing}")

    if problem == "CLUSTERING":
        k = int(frame.value("NB_CLST"))
        result = kmeans(prepared.feature_matrix, k, seed=seed)
        return {
            "clustering": result,
            "summary": {
                "k": k,
                "cluster_sizes": result.cluster_sizes(),
                "inertia": round(result.inertia, 6),
                "silhouette_mean": None if result.silhouette_mean is None
                else round(result.silhouette_mean, 6),
            },
        }

    if problem == "DIMENSIONALITY":
        n_components = int(frame.value("NB_CMPS"))
        result = pca(prepared.feature_matrix, n_components)
        return {
            "pca": result,
            "summary": {
                "n_components": n_components,
                "explained_variance_ratio": [
                    round(float(v), 6) for v in result.explained_variance_ratio],
            },
        }

    if problem in ("CLASSIFICATION", "PREDICTION"):
        kind = "classifier" if problem == "CLASSIFICATION" else "regressor"
        model = network.train_supervised(parts.train, kind,
                                         seed_policy=seed_policy,
                                         config=TRAIN_CONFIG)
        curve_seed = seed if seed is not None else \
            int(np.random.SeedSequence().entropy % (2 ** 31))
        curve_set = curves_mod.learning_curves(
            prepared, kind, k_folds=10, seed=curve_seed, config=CURVES_CONFIG)
        train_score = network.score(model, parts.train.feature_matrix,
                                    parts.train.target)
        test_score = network.score(model, parts.test.feature_matrix,
                                   parts.test.target)
        summary = {
            "kind": kind,
            "train_score": round(train_score, 6),
            "test_score": round(test_score, 6),
        }
        if "TEST" in frame:
            vector = parse_vector(frame.value("TEST"))
            predicted = network.predict(model, vector, prepared)
            summary["test_vector"] = vector
            summary["prediction"] = predicted if isinstance(predicted, str) \
                else round(predicted, 6)
        return {"model": model, "curves": curve_set, "summary": summary}

    if problem == "FEAT_IMP":
        result = rf_importance(prepared, seed=seed if seed is not None else 1)
        return {
            "importance": result,
            "summary": {
                "task": result.task,
                "importances": [round(float(v), 6) for v in result.importances],
            },
        }

    raise SessionError(f"no engine for problem {problem!r}")


def build_bundle(request_id: str, problem: str, outcome: dict, prepared):
    if problem == "CLUSTERING":
        return explain_clustering(outcome["clustering"],
                                  prepared.feature_names, request_id)
    if problem == "DIMENSIONALITY":
        return explain_pca(outcome["pca"], prepared.feature_names, request_id)
    if problem in ("CLASSIFICATION", "PREDICTION"):
        kind = "classifier" if problem == "CLASSIFICATION" else "regressor"
        return explain_supervised(outcome["curves"], kind, request_id)
    if problem == "FEAT_IMP":
        return explain_importance(outcome["importance"],
                                  prepared.feature_names, request_id)
    raise SessionError(f"no explanation generator for {problem!r}")


# --- the session -----------------------------------------------------------------

class _BridgeDialogue(Dialogue):
    """Routes say/ask through the session's event stream."""

    def __init__(self, session, ask_kind="question"):
        self.session = session
        self.ask_kind = ask_kind

    def say(self, text):
        self.session._emit("info", text=text)

    def ask(self, prompt):
        return self.session._ask(prompt, kind=self.ask_kind)


class Session:
    """One conversation with the workbench."""

    def __init__(self, config: ServiceConfig, dialogue: Dialogue,
                 registry: Optional[SlotRegistry] = None,
                 specs: Optional[dict] = None,
                 ledger: Optional[Ledger] = None,
                 energy_model: Optional[EnergyModel] = None,
                 emit: Optional[Callable] = None):
        self.config = config
        self.dialogue = dialogue
        if registry is not None:
            self.registry = registry
        elif config.registry_path:
            self.registry = load_registry(config.registry_path)
        else:
            self.registry = default_registry()
        self.specs = specs or load_algorithm_specs(config.algorithms_path)
        validate_registry_covers(self.registry, self.specs)
        self.ledger = ledger or Ledger(config.ledger_path)
        self.energy_model = energy_model or EnergyModel(
            cpu_power_w=config.cpu_power_w,
            carbon_intensity_kg_per_kwh=config.carbon_intensity_kg_per_kwh)
        self.emit_callback = emit
        self.events: list = []

    # -- event plumbing

    def _emit(self, kind: str, **payload) -> SessionEvent:
        event = SessionEvent(seq=len(self.events), kind=kind, payload=payload)
        self.events.append(event)
        if self.emit_callback:
            self.emit_callback(event)
        return event

    def _ask(self, prompt: str, kind: str = "question") -> str:
        self._emit(kind, prompt=prompt)
        return self.dialogue.ask(prompt)

    def greet(self) -> SessionEvent:
        return self._emit("prompt", text=COMMAND_PROMPT)

    # -- command handling

    def handle_command(self, text: str) -> list:
        """Run one command; returns the events it produced."""
        start = len(self.events)
        try:
            self._handle(text)
        except (DatasetError, SessionError, ValueError) as exc:
            self._emit("error", message=str(exc))
        return self.events[start:]

    def _handle(self, text: str) -> None:
        if re.search(r"\bpre-?process(?:ing)?\b", text, re.IGNORECASE):
            self._preprocess_flow(text)
            return

        frame = interpret(text, self.registry, ["PROBLEM", "DATASET"])
        problem = frame.value("PROBLEM")
        if problem is None:
            answer = self._ask(NO_PROBLEM_MESSAGE)
            problem = self._problem_from_answer(answer)
            if problem is None:
                self._emit("error", message=(
                    "no problem to resolve has been found in your text"))
                return

        spec = self.specs[problem]
        frame = interpret(text, self.registry, spec.required, spec.optional)
        if "PROBLEM" not in frame:
            frame.bind("PROBLEM", problem, 1.0)
        self._validate_bindings(frame)
        for key in spec.required:
            if key not in frame:
                frame.bind(key, self._prompt_for_key(key), 1.0)

        dataset_name = frame.value("DATASET")
        prepared = resolve_dataset(dataset_name, self.config.data_dir,
                                   _BridgeDialogue(self))

        policy = frame.value("RANDOM",
                             spec.defaults.get("RANDOM", network.REPRODUCTIBLE))
        seed = network.REPRODUCTIBLE_SEED if policy == network.REPRODUCTIBLE \
            else None

        algorithm = ALGORITHM_NAMES[problem]
        launched = self._footprint_gate(algorithm, dataset_name, prepared)
        if not launched:
            self._emit("info", text="Request aborted; nothing was executed.")
            return

        split_seed = seed if seed is not None else \
            int(np.random.SeedSequence().entropy % (2 ** 31))
        parts = split(prepared, ratio=SPLIT_RATIO, seed=split_seed)

        outcome = None

        def run():
            nonlocal outcome
            outcome = dispatch(frame, parts, seed, policy)
            return outcome

        ledger_error = None
        try:
            _, record = track(
                run,
                algorithm=algorithm,
                dataset_name=dataset_name,
                n_rows=prepared.n_rows,
                n_fields=prepared.n_features,
                ledger=self.ledger,
                energy_model=self.energy_model,
            )
        except LedgerWriteError as exc:
            # The engine ran; deliver the result and surface the problem.
            ledger_error = str(exc)
            record = exc.record

        bundle = build_bundle(record.request_id, problem, outcome, prepared)
        bundle_dir = write_bundle(bundle, self.config.out_dir)
        if ledger_error:
            self._emit("error", message=ledger_error)
        self._emit(
            "result",
            request_id=record.request_id,
            problem=problem,
            algorithm=algorithm,
            dataset=dataset_name,
            seed_policy=policy,
            duration_s=record.duration_s,
            emissions_kg=record.emissions_kg,
            summary=outcome["summary"],
            bundle_dir=str(bundle_dir),
            plots=[p.name for p in bundle.plots],
            tables=[t.name for t in bundle.tables],
            notes=bundle.notes,
        )

    # -- helpers

    def _preprocess_flow(self, text: str) -> None:
        resolution = resolve_key("DATASET", text, self.registry)
        if resolution is None:
            name = self._prompt_for_key("DATASET")
        else:
            name = resolution[0]
        bridge = _BridgeDialogue(self)
        schema = elicit_schema(name, bridge, self.config.data_dir)
        bridge.say("Processing to the file conversion...")
        prepared = apply_schema(
            read_raw_csv(Path(self.config.data_dir) / f"{name}.csv"),
            schema, data_dir=self.config.data_dir)
        bridge.say(f"The configuration is saved to {name}_preprocessed.csv")
        self._emit(
            "result",
            request_id=None,
            problem="PREPROCESS",
            dataset=name,
            summary={
                "n_rows": prepared.n_rows,
                "n_features": prepared.n_features,
                "target_kind": prepared.target_kind,
                "schema_file": f"{name}.json",
                "preprocessed_file": f"{name}_preprocessed.csv",
            },
        )

    def _problem_from_answer(self, answer: str) -> Optional[str]:
        token = answer.strip().upper().replace(" ", "_")
        if token in PROBLEM_VOCABULARY:
            return token
        resolution = resolve_key("PROBLEM", answer, self.registry)
        return resolution[0] if resolution else None

    def _validate_bindings(self, frame: CommandFrame) -> None:
        """Drop bindings whose values fail their type; they get re-asked."""
        for key in ("NB_CLST", "NB_CMPS"):
            if key in frame and not frame.value(key).isdigit():
                del frame.bindings[key]
                frame.unresolved.add(key)
        if "TEST" in frame:
            try:
                parse_vector(frame.value("TEST"))
            except ValueError:
                del frame.bindings["TEST"]

    def _prompt_for_key(self, key: str) -> str:
        prompt = KEY_PROMPTS.get(key, f"Please provide a value for {key}.")
        while True:
            answer = self._ask(prompt).strip()
            if key in ("NB_CLST", "NB_CMPS"):
                if answer.isdigit() and int(answer) > 0:
                    return answer
                self._emit("info", text="Please answer with a positive integer.")
            elif key == "TEST":
                try:
                    parse_vector(answer)
                    return answer
                except ValueError:
                    self._emit("info",
                               text="Please answer with a vector like [1.0,2.0].")
            elif answer:
                return answer

    def _footprint_gate(self, algorithm: str, dataset_name: str,
                        prepared) -> bool:
        estimate = predict_footprint(algorithm, prepared.n_rows,
                                     prepared.n_features, self.ledger)
        similar = similar_requests(
            (algorithm, dataset_name, prepared.n_rows, prepared.n_features),
            self.ledger)
        self._emit(
            "estimate",
            available=estimate is not None,
            duration_s=None if estimate is None else estimate.duration_s,
            emissions_kg=None if estimate is None else estimate.emissions_kg,
            trained_on=None if estimate is None else estimate.trained_on,
            similar=[{"request_id": r.request_id,
                      "dataset_name": r.dataset_name,
                      "algorithm": r.algorithm} for r in similar],
            text_lines=gate_lines(estimate, similar),
        )
        if self.config.auto_confirm:
            self._emit("info", text="Auto-confirm is enabled; launching.")
            return True
        while True:
            answer = self._ask("Launch the request (y/n)? ",
                               kind="confirm").strip().lower()
            if answer in ("y", "yes"):
                return True
            if answer in ("n", "no"):
                return False
            self._emit("info", text="Please answer y or n.")


# --- terminal REPL -----------------------------------------------------------------

def print_event(event: SessionEvent) -> None:
    kind, payload = event.kind, event.payload
    if kind == "prompt":
        print(payload["text"])
    elif kind == "info":
        print(payload["text"])
    elif kind == "estimate":
        for line in payload["text_lines"]:
            print(line)
    elif kind == "error":
        print(f"Error: {payload['message']}")
    elif kind == "result":
        if payload.get("request_id"):
            print(f"Request {payload['request_id']} finished "
                  f"({payload['duration_s']:.3f} s, "
                  f"{payload['emissions_kg']:.3e} kg CO2).")
            print(f"Explanations written to {payload['bundle_dir']}")
        print(f"Result: {json.dumps(payload['summary'])}")
    # question/confirm prompts are printed by the dialogue itself


def run_repl(config: ServiceConfig, script=None, echo: bool = True) -> Session:
    """Drive a session from the terminal (or from a scripted line list).

    The script, when given, supplies every input line: commands as well
    as answers to follow-up questions.  Returns the finished session.
    """
    if script is not None:
        dialogue = ScriptedDialogue(script, echo=echo)
    else:
        dialogue = StdioDialogue()
    session = Session(config, dialogue=dialogue,
                      emit=print_event if echo else None)
    while True:
        session.greet()
        try:
            command = dialogue.ask("> ")
        except (ScriptExhausted, EOFError):
            break
        command = command.strip()
        if command.lower() in ("exit", "quit"):
            break
        if not command:
            continue
        session.handle_command(command)
    return session
