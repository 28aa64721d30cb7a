"""Command orchestration: builds grids, priors and posteriors and emits records."""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from priorlab.config import PriorLabConfig
from priorlab.core.inference import (
    EFFICIENCY_TOL,
    ar1_posterior_b,
    info_delta,
    likelihood_only_output,
    optimal_output,
    posterior,
    random_candidates,
    rule_of_succession,
)
from priorlab.core.models import (
    AR1Model,
    Dataset,
    LikelihoodModel,
    bernoulli_model,
    simulate_ar1,
)
from priorlab.core.numerics import Grid, ParamDomain, build_grid
from priorlab.core.priors import (
    HALDANE,
    JEFFREYS,
    MDIP,
    MIXED,
    UNIFORM,
    PriorMeasure,
    jeffreys_ar1_density,
    mdip_ar1_density,
    normalize,
    prior_from_kind,
)
from priorlab.exceptions import ImproperPosteriorError, ModelError, PriorLabError
from priorlab.utils.data_io import dump_prior_record, prior_record, write_dataset

logger = logging.getLogger(__name__)

ENDPOINT_OFFSET = 1e-9
SUCCESSION_KINDS = (UNIFORM, JEFFREYS, MDIP, MIXED, HALDANE)
AR1_KINDS = (MDIP, JEFFREYS)
KERNEL_EXPONENTS = range(2, 9)
IMPROPER_CELL = "improper"

Record = Dict[str, object]


class PriorLabRunner:
    """Runs the CLI commands against a configuration and returns flat records."""

    def __init__(self, config: PriorLabConfig):
        """
        Initialize the runner.

        Args:
            config: Numerics, lump, processing and output configuration
        """
        self.config = config

    def grid_for(self, domain: ParamDomain, grid_size: Optional[int] = None, scheme: Optional[str] = None) -> Grid:
        numerics = self.config.numerics
        scheme = scheme or numerics.scheme_for(domain.lower, domain.upper)
        return build_grid(domain, grid_size or numerics.grid_size, scheme)

    def build_prior(
        self,
        kind: str,
        model: LikelihoodModel,
        grid: Grid,
        k0: Optional[float] = None,
        k1: Optional[float] = None,
    ) -> PriorMeasure:
        lumps = self.config.lumps
        return prior_from_kind(
            kind,
            model,
            grid,
            k0=lumps.k0 if k0 is None else k0,
            k1=lumps.k1 if k1 is None else k1,
            rel_tol=self.config.numerics.rel_tol,
            h=self.config.numerics.fd_step,
        )

    def _run_cells(self, fn: Callable, cells: Sequence, desc: str) -> List:
        """Evaluate independent cells, returning results in cell order."""
        max_workers = self.config.processing.max_workers
        disable = not self.config.processing.show_progress
        results: List = [None] * len(cells)

        if max_workers == 1:
            for index, cell in enumerate(tqdm(cells, desc=desc, file=sys.stderr, disable=disable)):
                results[index] = fn(cell)
            return results

        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_index = {executor.submit(fn, cell): index for index, cell in enumerate(cells)}
            for future in tqdm(
                as_completed(future_to_index),
                total=len(future_to_index),
                desc=desc,
                file=sys.stderr,
                disable=disable,
            ):
                results[future_to_index[future]] = future.result()
        return results

    def run_prior(
        self,
        model: LikelihoodModel,
        kind: str,
        grid_size: Optional[int] = None,
        scheme: Optional[str] = None,
        normalize_prior: bool = False,
        k0: Optional[float] = None,
        k1: Optional[float] = None,
        save_path: Optional[str] = None,
    ) -> List[Record]:
        """Density table, atoms and a summary with the one-sided endpoint limits."""
        _require_scalar_model(model)
        grid = self.grid_for(model.theta_domain, grid_size, scheme)
        prior = self.build_prior(kind, model, grid, k0, k1)
        if normalize_prior:
            prior = normalize(prior, self.config.numerics.rel_tol)
        if save_path:
            dump_prior_record(prior_record(prior, grid), save_path)
            logger.info("saved %s prior record to %s", prior.label, save_path)

        records: List[Record] = [
            {"record": "density", "node": float(node), "density": float(value)}
            for node, value in zip(grid.nodes, prior.density_on(grid))
        ]
        records.extend({"record": "atom", "location": loc, "mass": mass} for loc, mass in prior.atoms)
        domain = prior.domain
        records.append({
            "record": "summary",
            "label": prior.label,
            "proper": prior.proper,
            "total_mass": prior.total_mass,
            "constant": float(prior.constant),
            "lower_limit": float(prior(domain.lower + ENDPOINT_OFFSET)),
            "upper_limit": float(prior(domain.upper - ENDPOINT_OFFSET)),
        })
        return records

    def run_posterior(
        self,
        model: LikelihoodModel,
        data: Dataset,
        kind: str,
        grid_size: Optional[int] = None,
        scheme: Optional[str] = None,
        k0: Optional[float] = None,
        k1: Optional[float] = None,
    ) -> List[Record]:
        _require_scalar_model(model)
        grid = self.grid_for(model.theta_domain, grid_size, scheme)
        prior = self.build_prior(kind, model, grid, k0, k1)
        result = posterior(prior, model, data, grid)

        records: List[Record] = [
            {"record": "density", "node": float(node), "density": float(value)}
            for node, value in zip(grid.nodes, result.density.values)
        ]
        records.extend({"record": "atom", "location": loc, "mass": mass} for loc, mass in result.atoms)
        records.append({
            "record": "summary",
            "prior": result.prior_label,
            "data": result.data_summary,
            "marginal": result.marginal,
            "log_marginal": result.log_marginal,
            "prior_normalized": result.prior_normalized,
            "mean": result.mean(),
            "sd": result.sd(),
        })
        return records

    def run_succession(
        self,
        n_max: int,
        kinds: Sequence[str] = SUCCESSION_KINDS,
        grid_size: Optional[int] = None,
        scheme: Optional[str] = None,
        k0: Optional[float] = None,
        k1: Optional[float] = None,
        limit: bool = False,
    ) -> List[Record]:
        """Rule-of-succession table, rows n = 0..n_max and one column per prior."""
        if n_max < 0:
            raise PriorLabError(f"n-max must be nonnegative, got {n_max}")
        model = bernoulli_model()
        grid = self.grid_for(model.theta_domain, grid_size, scheme)
        priors = {kind: self.build_prior(kind, model, grid, k0, k1) for kind in kinds}

        def cell(key):
            n, kind = key
            try:
                return rule_of_succession(priors[kind], n, grid=grid, limit=limit)
            except ImproperPosteriorError:
                return IMPROPER_CELL

        keys = [(n, kind) for n in range(n_max + 1) for kind in kinds]
        values = dict(zip(keys, self._run_cells(cell, keys, "Succession table")))
        records: List[Record] = []
        for n in range(n_max + 1):
            row: Record = {"record": "succession", "n": n}
            for kind in kinds:
                row[priors[kind].label if kind == MIXED else kind] = values[(n, kind)]
            records.append(row)
        return records

    def run_efficiency(
        self,
        model: LikelihoodModel,
        data: Dataset,
        kind: str,
        perturbations: int = 0,
        seed: Optional[int] = None,
        grid_size: Optional[int] = None,
        scheme: Optional[str] = None,
    ) -> List[Record]:
        """Information-processing report for the posterior, the likelihood-only output and perturbations."""
        if perturbations < 0:
            raise PriorLabError(f"perturbations must be nonnegative, got {perturbations}")
        if perturbations > 0 and seed is None:
            raise PriorLabError("a --seed is required when perturbations > 0")
        _require_scalar_model(model)
        grid = self.grid_for(model.theta_domain, grid_size, scheme)
        prior = self.build_prior(kind, model, grid)

        best = optimal_output(prior, model, data, grid)
        reports = [
            info_delta(best, prior, model, data, label="posterior"),
            info_delta(
                likelihood_only_output(model, data, grid),
                None,
                model,
                data,
                include_prior=False,
                label="likelihood-only",
            ),
        ]
        records: List[Record] = [{"record": "efficiency", **report.as_dict()} for report in reports]
        passed = all(report.delta <= EFFICIENCY_TOL for report in reports)

        if perturbations > 0:
            rng = np.random.default_rng(seed)
            candidates = list(random_candidates(best, perturbations, rng))

            def score(candidate):
                return info_delta(candidate, prior, model, data, label="perturbation").delta

            deltas = self._run_cells(score, candidates, "Perturbations")
            records.append({
                "record": "summary",
                "perturbations": perturbations,
                "min_delta": float(min(deltas)),
                "max_delta": float(max(deltas)),
            })
            passed = passed and min(deltas) >= -EFFICIENCY_TOL

        if not passed:
            records.append({"record": "error", "message": "efficiency check failed"})
        return records

    def run_ar1(
        self,
        T: Optional[int] = None,
        b: Optional[float] = None,
        sigma: float = 1.0,
        seed: Optional[int] = None,
        data: Optional[Dataset] = None,
        grid_size: Optional[int] = None,
        scheme: Optional[str] = None,
        save_data: Optional[str] = None,
    ) -> List[Record]:
        """Posteriors over b under both AR(1) kernels plus kernel samples near b = +-1."""
        AR1Model.check_parameters(0.0, sigma)
        if data is None:
            if T is None or b is None:
                raise PriorLabError("simulation needs --T and --b (or pass --data)")
            if seed is None:
                raise PriorLabError("a --seed is required to simulate the AR(1) series")
            data = simulate_ar1(T, b, sigma, seed)
        elif data.model_label != "ar1":
            raise ModelError(f"the ar1 command needs an ar1 dataset, got {data.model_label!r}")
        if save_data:
            write_dataset(data, save_data)

        grid = self.grid_for(ParamDomain.open_singular(-1.0, 1.0), grid_size, scheme)
        results = self._run_cells(lambda kind: ar1_posterior_b(data, sigma, kind, grid), AR1_KINDS, "AR(1) posteriors")

        records: List[Record] = []
        for kind, result in zip(AR1_KINDS, results):
            records.append({
                "record": "ar1",
                "prior": kind,
                "T": len(data),
                "sigma": float(sigma),
                "mean": result.mean(),
                "sd": result.sd(),
                "mode": float(grid.nodes[int(np.argmax(result.density.values))]),
            })
        for sign in (-1.0, 1.0):
            for k in KERNEL_EXPONENTS:
                point = sign * (1.0 - 10.0 ** (-k))
                records.append({
                    "record": "kernel",
                    "b": point,
                    "mdip": float(mdip_ar1_density(point, sigma)),
                    "jeffreys": float(jeffreys_ar1_density(point, sigma)),
                })
        records.append({
            "record": "summary",
            "mean_difference": abs(results[0].mean() - results[1].mean()),
        })
        return records


def _require_scalar_model(model: LikelihoodModel) -> None:
    if isinstance(model, AR1Model):
        raise ModelError("AR(1) inference runs through the ar1 command")
    if model.parameter_dim != 1:
        raise ModelError(f"{model.label} has a {model.parameter_dim}-dimensional parameter; grids are one-dimensional")
