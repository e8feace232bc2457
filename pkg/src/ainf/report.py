"""Check results: a list of violations plus free-form info, never exceptions."""
from __future__ import annotations

from dataclasses import dataclass, field

from .novikov import ZERO, MonoidElement


@dataclass(frozen=True)
class Violation:
    check: str
    k: int | None = None
    beta: MonoidElement | None = None
    inputs: tuple = ()
    residual: str = ""

    def sort_key(self):
        beta = self.beta or ZERO
        return (self.check, -1 if self.k is None else self.k, beta, self.inputs)

    def __str__(self):
        parts = [self.check]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.beta is not None:
            parts.append(f"beta=({self.beta})")
        if self.inputs:
            parts.append("inputs=(" + ",".join(self.inputs) + ")")
        if self.residual:
            parts.append(f"residual: {self.residual}")
        return " ".join(parts)


@dataclass
class Report:
    name: str
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def add(self, check: str, k=None, beta=None, inputs=(), residual="") -> None:
        self.violations.append(Violation(check, k, beta, tuple(inputs), residual))

    def extend(self, other: "Report") -> "Report":
        self.violations.extend(other.violations)
        for key, value in other.info.items():
            self.info[f"{other.name}.{key}"] = value
        return self

    def finish(self) -> "Report":
        self.violations.sort(key=Violation.sort_key)
        return self

    def checks_failed(self) -> set:
        return {v.check for v in self.violations}

    def lines(self) -> list[str]:
        status = "pass" if self.passed else f"fail ({len(self.violations)} violations)"
        out = [f"{self.name}: {status}"]
        out.extend(f"  {v}" for v in self.violations)
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "violations": [
                {"check": v.check, "k": v.k, "beta": None if v.beta is None else str(v.beta),
                 "inputs": list(v.inputs), "residual": v.residual}
                for v in self.violations
            ],
            "info": {k: str(v) for k, v in self.info.items()},
        }
