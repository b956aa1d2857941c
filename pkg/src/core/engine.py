"""
Run orchestrator for glupoly
Resolves inputs, runs one operation, writes outputs with their manifests
"""

from dataclasses import dataclass, field
from functools import wraps
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.core import dynamics, gluing, polyengine, recursion, zeros
from src.core.catalog import CATALOG, catalog, catalog_names
from src.core.config_manager import config
from src.core.errors import (
    BudgetExceededError,
    GlupolyError,
    InvalidArgumentError,
    UnknownCatalogEntryError,
)
from src.core.gluing import GluingData
from src.core.graph import (
    MarkedGraph,
    all_assignments,
    format_assignment,
    is_maximally_independent,
    parse_assignment,
)
from src.utils import formats
from src.utils.logger import logger


@dataclass
class RunResult:
    success: bool
    message: str
    exit_code: int = 0
    files: List[str] = field(default_factory=list)
    payload: Optional[str] = None


def guarded(method: Callable) -> Callable:
    """Turn GlupolyError refusals into failed RunResults carrying their exit code"""

    @wraps(method)
    def wrapper(self, *args, **kwargs) -> RunResult:
        try:
            return method(self, *args, **kwargs)
        except GlupolyError as e:
            logger.error(f"{method.__name__} refused: {e}")
            return RunResult(False, str(e), e.exit_code)

    return wrapper


def parse_complex(text: str) -> complex:
    """'re,im' or a plain real number"""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InvalidArgumentError(f"Cannot read '{text}' as a complex number (use re,im)")


class GlupolyEngine:
    """Coordinates input resolution, domain operations and output files"""

    def __init__(self):
        self.inputs: Dict[str, str] = {}

    # ---------------------------------------------------------- inputs

    def resolve_data(self, spec: str) -> Tuple[GluingData, Optional[MarkedGraph]]:
        """A gluing JSON file, or a catalog name (which also brings a start graph)"""
        path = Path(spec)
        if path.is_file():
            text = path.read_text(encoding="utf-8")
            self.inputs["data"] = formats.digest_text(text)
            logger.engine_event("data", f"loaded {path}")
            return formats.gluing_from_json(text), None
        if path.suffix == ".json":
            raise InvalidArgumentError(f"Gluing data file {spec} not found")
        name = spec
        if name not in CATALOG:
            raise UnknownCatalogEntryError(spec, CATALOG)
        data, start = catalog(name)
        self.inputs["data"] = formats.digest_text(formats.gluing_to_json(data))
        logger.engine_event("data", f"catalog entry {name}")
        return data, start

    def resolve_start(self, spec: Optional[str], default: Optional[MarkedGraph]) -> MarkedGraph:
        if spec:
            path = Path(spec)
            if path.is_file():
                text = path.read_text(encoding="utf-8")
                self.inputs["start"] = formats.digest_text(text)
                return formats.graph_from_text(text)
            if spec in CATALOG:
                default = catalog(spec)[1]
            else:
                raise InvalidArgumentError(f"Start graph '{spec}' is neither a file nor a catalog name")
        if default is None:
            raise InvalidArgumentError("A start graph is required when --data is a file")
        self.inputs["start"] = formats.digest_text(formats.graph_to_text(default))
        return default

    def load(self, data_spec: str, start_spec: Optional[str] = None,
             need_start: bool = True) -> Tuple[GluingData, Optional[MarkedGraph]]:
        self.inputs = {}
        data, default = self.resolve_data(data_spec)
        start = self.resolve_start(start_spec, default) if need_start else None
        return data, start

    # ---------------------------------------------------------- outputs

    def emit(self, subcommand: str, text: str, out: Optional[str]) -> List[str]:
        if not out:
            return []
        formats.atomic_write_text(out, text)
        manifest = formats.build_manifest(subcommand, self.inputs, config.snapshot(), [Path(out).name])
        manifest_path = formats.write_manifest(out, manifest)
        logger.engine_event("output", f"{subcommand} wrote {out}")
        return [str(out), str(manifest_path)]

    def finish(self, subcommand: str, text: str, out: Optional[str], message: str) -> RunResult:
        files = self.emit(subcommand, text, out)
        return RunResult(True, message, 0, files, None if files else text)

    # ---------------------------------------------------------- operations

    @guarded
    def validate(self, data_spec: str, out: Optional[str] = None) -> RunResult:
        data, _ = self.load(data_spec, need_start=False)
        report = gluing.validate(data)
        text = "valid\n" if not report else "".join(f"invalid: {line}\n" for line in report)
        files = self.emit("validate", text, out)
        if report:
            return RunResult(False, f"Gluing data invalid ({len(report)} problem(s))", 2, files,
                             None if files else text)
        return RunResult(True, "Gluing data valid", 0, files, None if files else text)

    @guarded
    def classify(self, data_spec: str, out: Optional[str] = None) -> RunResult:
        data, _ = self.load(data_spec, need_start=False)
        result = gluing.classify(data)
        dyn = gluing.label_dynamics(data)
        logger.engine_event("classify", f"periodic labels {sorted(dyn.periodic_labels)}")
        return self.finish("classify", result.tokens() + "\n", out, "Classification complete")

    @guarded
    def portrait(self, data_spec: str, out: Optional[str] = None) -> RunResult:
        data, _ = self.load(data_spec, need_start=False)
        return self.finish("portrait", gluing.portrait_dot(data), out, "Portrait written")

    @guarded
    def build(self, data_spec: str, start_spec: Optional[str], levels: int,
              out: Optional[str] = None, dot: bool = False) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        g = recursion.iterate(data, start, levels)
        text = formats.graph_to_dot(g) if dot else formats.graph_to_text(g)
        return self.finish("build", text, out,
                           f"Level {levels}: {g.vertex_count} vertices, {g.graph.edge_count} edges")

    @guarded
    def poly(self, data_spec: str, start_spec: Optional[str], levels: int,
             entry: Optional[str] = None, out: Optional[str] = None) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        vectors = polyengine.sequence(data, start, levels)
        if len(vectors) <= levels:
            counts = recursion.vertex_count_sequence(data, start.vertex_count, len(vectors))
            raise BudgetExceededError("degree", counts[-1], config.get("budgets.poly_degree", 100000))
        vector = vectors[levels]
        if entry is not None:
            bits = parse_assignment(entry, data.k)
            text = vector.entry(bits).to_text() + "\n"
        else:
            lines = [f"{format_assignment(bits)} {p.to_text()}"
                     for bits, p in zip(all_assignments(data.k), vector.entries)]
            lines.append(f"total {polyengine.total(vector).to_text()}")
            text = "\n".join(lines) + "\n"
        return self.finish("poly", text, out, f"Level {levels} polynomials computed")

    @guarded
    def zeros(self, data_spec: str, start_spec: Optional[str], levels: int,
              out: Optional[str] = None) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        result = zeros.atlas(data, start, levels)
        csv_text = formats.rows_to_csv(("n", "re", "im", "modulus", "residual"), result.to_rows())
        summary = result.summary()
        message = f"Zero atlas over {len(result.levels)} levels: {summary['verdict']}"
        if not out:
            return RunResult(True, message, 0, [], formats.dumps_json(summary))
        target = Path(out)
        files = self.emit("zeros", csv_text, str(target / "zeros.csv"))
        files += self.emit("zeros", formats.dumps_json(summary), str(target / "summary.json"))
        return RunResult(True, message, 0, files)

    @guarded
    def dynamics(self, data_spec: str, lam_text: str, start_spec: Optional[str],
                 iters: Optional[int] = None, out: Optional[str] = None) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        lam = parse_complex(lam_text)
        vector = polyengine.initial_vector(start)
        start_point = dynamics.NumVector(vector.evaluate(lam), lam)
        summary = dynamics.orbit(data, lam, start_point, iters)
        rows = [(r.iteration, r.residual, r.step_distance, r.dist_to_ones_mass) for r in summary.records]
        text = formats.rows_to_csv(("iter", "residual", "step_distance", "dist_to_ones_mass"), rows)
        state = "converged" if summary.converged else ("truncated" if summary.truncated else "not converged")
        return self.finish("dynamics", text, out, f"Orbit {state} after {len(rows)} iterations")

    @guarded
    def jacobian(self, data_spec: str, lam_text: str, free_text: str,
                 out: Optional[str] = None) -> RunResult:
        data, _ = self.load(data_spec, need_start=False)
        lam = parse_complex(lam_text)
        free = [parse_complex(tok) for tok in free_text.split(";")] if ";" in free_text \
            else [complex(float(tok)) for tok in free_text.split(",")]
        p_iter = gluing.fm_iterate(data)
        point = dynamics.fixed_manifold_point(data, lam, free)
        jac = dynamics.jacobian(data, lam, point, iterations=p_iter)
        report = dynamics.spectral_check(jac, gluing.label_dynamics(data).k0)
        document = {
            "lambda": [lam.real, lam.imag],
            "iterate": p_iter,
            "point": [[z.real, z.imag] for z in point.coords],
            "matrix": [[[z.real, z.imag] for z in row] for row in np.asarray(jac)],
            "report": report.as_dict(),
        }
        return self.finish("jacobian", formats.dumps_json(document), out,
                           f"Spectral report: rank {report.idempotent_rank}, kernel {report.kernel_dimension}")

    @guarded
    def maxindep(self, start_spec: str, out: Optional[str] = None) -> RunResult:
        self.inputs = {}
        start = self.resolve_start(start_spec, None)
        verdict, report = is_maximally_independent(start)
        document = {
            "maximally_independent": verdict,
            "ones_minus_zeros": report.ones_minus_zeros,
            "unique_maxima": report.unique_maxima,
            "excess_identity": report.excess_identity,
            "rows": list(report.rows),
        }
        return self.finish("maxindep", formats.dumps_json(document), out,
                           "Maximally independent" if verdict else "Not maximally independent")

    @guarded
    def separation(self, data_spec: str, start_spec: Optional[str], levels: int,
                   out: Optional[str] = None) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        matrix = gluing.separation_distances(data, start, levels)
        lines = [" ".join("inf" if v == float("inf") else str(int(v)) for v in row) for row in matrix]
        return self.finish("separation", "\n".join(lines) + "\n", out, f"Mark distances at level {levels}")

    @guarded
    def freeenergy(self, data_spec: str, start_spec: Optional[str], levels: int, lam_text: str,
                   out: Optional[str] = None) -> RunResult:
        data, start = self.load(data_spec, start_spec)
        lam = parse_complex(lam_text)
        values = polyengine.free_energy_sequence(data, start, levels, lam)
        counts = recursion.vertex_count_sequence(data, start.vertex_count, levels)
        rows = [(n, counts[n], values[n]) for n in range(len(values))]
        text = formats.rows_to_csv(("n", "vertices", "free_energy"), rows)
        return self.finish("freeenergy", text, out, f"Free energy over {len(values)} levels")

    @guarded
    def catalog_export(self, name: str, out: Optional[str] = None) -> RunResult:
        self.inputs = {}
        data, start = catalog(name)
        document = formats.gluing_to_json(data)
        if not out:
            return RunResult(True, f"Catalog entry {name}", 0, [], document)
        target = Path(out)
        files = self.emit("catalog", document, str(target / f"{name}.json"))
        files += self.emit("catalog", formats.graph_to_text(start), str(target / f"{name}.graph"))
        return RunResult(True, f"Exported catalog entry {name}", 0, files)

    def catalog_list(self) -> List[str]:
        return catalog_names()


# Global engine instance
engine = GlupolyEngine()
