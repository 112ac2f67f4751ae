"""Request history: measured duration and estimated CO2 per executed request.

The ledger is an append-only JSON-lines file, one record per line.  The
energy model is a transparent formula (constant CPU power times wall
time times grid carbon intensity) so tests can inject a fake clock and
assert exact numbers.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, asdict
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

JOULES_PER_KWH = 3.6e6


class LedgerError(RuntimeError):
    pass


class LedgerWriteError(LedgerError):
    """Raised after the wrapped request ran but its record could not be saved.

    The request result is attached so callers can still deliver it.
    """

    def __init__(self, message, result=None, record=None):
        super().__init__(message)
        self.result = result
        self.record = record


@dataclass
class EnergyModel:
    cpu_power_w: float = 65.0
    carbon_intensity_kg_per_kwh: float = 0.475
    utilization: float = 1.0

    def __post_init__(self):
        if self.cpu_power_w <= 0 or self.carbon_intensity_kg_per_kwh <= 0:
            raise ValueError("energy model constants must be positive")
        if not 0 < self.utilization <= 1:
            raise ValueError("utilization must be in (0, 1]")

    def emissions_kg(self, duration_s: float) -> float:
        energy_kwh = self.cpu_power_w * self.utilization * duration_s / JOULES_PER_KWH
        return energy_kwh * self.carbon_intensity_kg_per_kwh


@dataclass
class RequestRecord:
    request_id: str            # "_YYYY-MM-DD_HH-MM-SS"
    algorithm: str
    dataset_name: str
    n_rows: int
    n_fields: int
    duration_s: float
    emissions_kg: float

    def __post_init__(self):
        if self.duration_s < 0 or self.emissions_kg < 0:
            raise ValueError("duration and emissions must be non-negative")

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, line: str) -> "RequestRecord":
        return cls(**json.loads(line))


def request_id_for(moment: datetime) -> str:
    return moment.strftime("_%Y-%m-%d_%H-%M-%S")


class Ledger:
    """Append-only JSON-lines store of RequestRecords.

    Writes are serialised through a lock; `cache` is a scratch dict for
    derived artifacts (e.g. the footprint predictor) and is cleared on
    every append.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.cache: dict = {}
        self.version = 0

    def records(self) -> list:
        if not self.path.exists():
            return []
        records = []
        try:
            with open(self.path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        records.append(RequestRecord.from_json(line))
                    except (json.JSONDecodeError, TypeError) as exc:
                        raise LedgerError(
                            f"{self.path}:{lineno}: bad ledger line: {exc}") from exc
        except OSError as exc:
            raise LedgerError(f"ledger not readable: {exc}") from exc
        return records

    def __len__(self):
        return len(self.records())

    def append(self, record: RequestRecord) -> None:
        with self._lock:
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(record.to_json() + "\n")
                    fh.flush()
            except OSError as exc:
                raise LedgerError(f"ledger not writable: {exc}") from exc
            self.cache.clear()
            self.version += 1

    def existing_ids(self) -> set:
        return {r.request_id for r in self.records()}

    def next_request_id(self, moment: Optional[datetime] = None) -> str:
        """Timestamp id, bumped by one second until unique in this ledger."""
        from datetime import timedelta
        moment = moment or datetime.now()
        taken = self.existing_ids()
        rid = request_id_for(moment)
        while rid in taken:
            moment = moment + timedelta(seconds=1)
            rid = request_id_for(moment)
        return rid


def track(request: Callable, *, algorithm: str, dataset_name: str,
          n_rows: int, n_fields: int, ledger: Ledger,
          energy_model: EnergyModel,
          clock: Callable[[], float] = time.perf_counter,
          now: Callable[[], datetime] = datetime.now):
    """Run `request`, measure it, and append a record to the ledger.

    Returns (result, record).  The record is appended even when the
    request raises (the error propagates afterwards).  If the request
    succeeded but the ledger cannot be written, a LedgerWriteError
    carrying the result is raised so nothing computed is lost.
    """
    try:
        request_id = ledger.next_request_id(now())
    except LedgerError:
        # Ledger unreadable; run anyway and let the append surface the problem.
        request_id = request_id_for(now())
    started = clock()
    error = None
    result = None
    try:
        result = request()
    except Exception as exc:
        error = exc
    duration = max(0.0, clock() - started)
    record = RequestRecord(
        request_id=request_id,
        algorithm=algorithm,
        dataset_name=dataset_name,
        n_rows=int(n_rows),
        n_fields=int(n_fields),
        duration_s=duration,
        emissions_kg=energy_model.emissions_kg(duration),
    )
    try:
        ledger.append(record)
    except LedgerError as exc:
        if error is not None:
            raise error
        raise LedgerWriteError(str(exc), result=result, record=record) from exc
    if error is not None:
        raise error
    return result, record
