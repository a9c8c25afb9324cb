from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any

from hbm.boundary import closed_forms
from hbm.boundary.estimates import (
    TEST_FUNCTIONS,
    BoundDirection,
    BoundReport,
    boundary_estimate,
    test_function_quotient,
)
from hbm.boundary.harmonic import (
    EvenPolynomialBasis,
    HarmonicBasis,
    Parity,
    parse_polynomial,
)
from hbm.boundary.pbm_form import pbm_boundary_form_margin
from hbm.boundary.planar import PlanarBoundary, planar_boundary, polygonize
from hbm.boundary.reilly import ReillyDomain, reilly_sides
from hbm.common.errors import GridError, InputError
from hbm.common.routers import CommandRouter
from hbm.common.rng import make_generator
from hbm.config.numerics import WEINGARTEN_SAMPLES
from hbm.geometry.bodies import BodySpec
from hbm.geometry.dsl import parse_bodies, parse_body
from hbm.geometry.fields import sample_field
from hbm.minkowski.mixed import first_lp_minkowski_margin, mixed_volume_table
from hbm.spectrum.concavity import geodesic_concavity
from hbm.spectrum.gap import equivariance_check, random_transform, spectrum_table
from hbm.sphere.grids import SphereGrid, dump_mesh, parse_grid
from hbm.stability.corpus import parse_corpus
from hbm.stability.report import stability_report

logger = logging.getLogger(__name__)

router = CommandRouter(prog="hbm", description="Local L^p Brunn-Minkowski numerics")

DEFAULT_GRIDS = {2: "s1:N=512", 3: "s2:L=4"}


def _add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dim", type=int, choices=(2, 3), default=None)
    parser.add_argument("--grid", default=None, help="s1:N=<int> or s2:L=<int>")


def _add_domain_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--domain",
        choices=[item.value for item in ReillyDomain],
        default="disk",
    )


def _grid(args: argparse.Namespace) -> SphereGrid:
    dim = args.dim
    if args.grid is None:
        args.grid = DEFAULT_GRIDS[dim or 2]
    grid = parse_grid(args.grid)
    if dim is not None and grid.dim != dim:
        msg = f"grid {args.grid} has dimension {grid.dim}, but --dim {dim} was given"
        raise GridError(msg)
    args.dim = grid.dim
    return grid


def _body(text: str, grid: SphereGrid) -> BodySpec:
    return parse_body(text, dim=grid.dim, grid=grid)


@router.register("spectrum", help="eigenvalues of -L_K, lambda_1e and p*")
class SpectrumCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--body", required=True)
        _add_grid_arguments(parser)
        parser.add_argument(
            "--k",
            type=int,
            default=6,
            help="eigenvalues, with multiplicity",
        )
        parser.add_argument(
            "--even",
            action="store_true",
            help="restrict to even functions",
        )
        parser.add_argument(
            "--transforms",
            type=int,
            default=0,
            help="random linear images to compare",
        )
        parser.add_argument("--max-condition", type=float, default=4.0)
        parser.add_argument("--dump-mesh", type=Path, default=None)

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        grid = _grid(args)
        body = _body(args.body, grid)
        report = spectrum_table(body, grid, args.k, even=args.even)
        result: dict[str, Any] = {"body": body.describe(), **report.to_dict()}
        if args.transforms:
            generator = make_generator(args.seed)
            transforms = [
                random_transform(generator, grid.dim, args.max_condition)
                for _ in range(args.transforms)
            ]
            checks = [
                equivariance_check(body, transform, grid, args.k)
                for transform in transforms
            ]
            result["equivariance"] = [check.to_dict() for check in checks]
            result["max_discrepancy"] = max(check.discrepancy for check in checks)
        if args.dump_mesh is not None:
            dump_mesh(grid, args.dump_mesh)
        return result


@router.register("pbm-check", help="concavity of the L^p combination between two bodies")
class PBMCheckCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--body0", required=True)
        parser.add_argument("--body1", required=True)
        parser.add_argument("--p", type=float, required=True)
        parser.add_argument("--lambdas", type=int, default=9)
        _add_grid_arguments(parser)

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        grid = _grid(args)
        report = geodesic_concavity(
            _body(args.body0, grid),
            _body(args.body1, grid),
            args.p,
            args.lambdas,
            grid,
        )
        return {**report.to_dict(), **grid.metadata()}


@router.register("mixed", help="table of mixed volumes V(K_i, ..., K_i, K_j)")
class MixedCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--bodies",
            required=True,
            help="';'-separated body descriptions",
        )
        _add_grid_arguments(parser)
        parser.add_argument(
            "--p",
            type=float,
            default=None,
            help="also report first L^p Minkowski margins",
        )

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        grid = _grid(args)
        bodies = parse_bodies(args.bodies, dim=grid.dim, grid=grid)
        if not bodies:
            msg = "no bodies given"
            raise InputError(msg)
        fields = [sample_field(body, grid) for body in bodies]
        result: dict[str, Any] = {
            "bodies": [body.describe() for body in bodies],
            "table": mixed_volume_table(fields),
            **grid.metadata(),
        }
        if args.p is not None:
            result["first_lp_margins"] = [
                [first_lp_minkowski_margin(first, second, args.p) for second in fields]
                for first in fields
            ]
        return result


QUANTITIES = (
    "bh-est",
    "b-est",
    "d-est",
    "quotient",
    "dk-upper",
    "bh-upper",
    "bh-upper-lq",
    "q-kw",
    "trace",
    "steklov",
    "reilly",
    "pbm-form",
)


def _boundary(args: argparse.Namespace) -> PlanarBoundary:
    if args.body is None:
        msg = f"--quantity {args.quantity} needs --body"
        raise InputError(msg)
    body = parse_body(args.body, dim=2)
    if args.polygonize is not None:
        return polygonize(body, args.polygonize)
    return planar_boundary(body, args.samples)


def _required(args: argparse.Namespace, *names: str) -> list[Any]:
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        msg = f"--quantity {args.quantity} needs {flags}"
        raise InputError(msg)
    return [getattr(args, name) for name in names]


def _upper(quantity: str, value: float, inputs: dict[str, object]) -> BoundReport:
    return BoundReport(
        quantity=quantity,
        direction=BoundDirection.UPPER,
        value=value,
        inputs=inputs,
    )


def _boundary_quantity(  # noqa: C901, PLR0911
    args: argparse.Namespace,
) -> BoundReport | dict[str, Any]:
    quantity = args.quantity
    if quantity == "bh-est":
        basis = HarmonicBasis(args.degree, Parity(args.parity))
        return boundary_estimate(_boundary(args), basis, "bh")
    if quantity in ("b-est", "d-est"):
        polynomials = EvenPolynomialBasis(args.degree)
        return boundary_estimate(_boundary(args), polynomials, quantity[0])
    if quantity == "quotient":
        target: PlanarBoundary | int
        if args.body is None and args.n is not None:
            target = args.n
        else:
            target = _boundary(args)
        return test_function_quotient(target, args.u or TEST_FUNCTIONS[0])
    if quantity == "dk-upper":
        r, big_r, c_poin, n = _required(args, "r", "big_r", "c_poin", "n")
        inputs = {"r": r, "R": big_r, "C_poin": c_poin, "n": n}
        return _upper("d", closed_forms.dk_upper_bound(r, big_r, c_poin, n), inputs)
    if quantity == "bh-upper":
        c_poin, r, max_hess = _required(args, "c_poin", "r", "max_hess")
        value = closed_forms.bh_upper_general(c_poin, r, max_hess)
        inputs = {"C_poin": c_poin, "r": r, "max_hess": max_hess}
        result = _bh_upper(value, inputs, args.n or 2)
        if args.w_range is not None:
            # Q_{K,w} of the same W
            q_value, below_one = closed_forms.q_kw(c_poin, max_hess, args.w_range)
            result["Q_Kw"], result["Q_Kw_below_one"] = q_value, below_one
        return result
    if quantity == "bh-upper-lq":
        q, n, c_poin = _required(args, "q", "n", "c_poin")
        r = args.r if args.r is not None else 1.0
        inputs = {"q": q, "n": n, "C_poin": c_poin, "r": r}
        return _bh_upper(closed_forms.bh_upper_lq(q, n, c_poin, r), inputs, n)
    if quantity == "q-kw":
        c_poin, max_hess, w_range = _required(args, "c_poin", "max_hess", "w_range")
        value, below_one = closed_forms.q_kw(c_poin, max_hess, w_range)
        return {"quantity": "q_kw", "value": value, "below_one": below_one}
    if quantity == "trace":
        n, r, big_r, c_che = _required(args, "n", "r", "big_r", "c_che")
        classical, improved = closed_forms.trace_constants(n, r, big_r, c_che)
        return {"quantity": "trace", "classical": classical, "improved": improved}
    if quantity == "steklov":
        n, k = _required(args, "n", "k")
        return SteklovCommand.evaluate(n, k)
    if quantity == "reilly":
        return ReillyCommand.evaluate(args.domain, args.u or "x^2 - y^2")
    boundary = _boundary(args)
    (text,) = _required(args, "psi")
    psi = parse_polynomial(text)(boundary.points)
    margin = pbm_boundary_form_margin(boundary, psi, args.p)
    return {"quantity": "pbm_form", "p": args.p, "margin": margin}


def _bh_upper(value: float, inputs: dict[str, object], n: int) -> dict[str, Any]:
    result = _upper("bh", value, inputs).to_dict()
    if value > 0:
        result["lambda_1e_lower"] = closed_forms.bh_to_gap_bound(value, n)
        result["p_bm"] = closed_forms.p_from_bh(value)
    return result


@router.register("boundary", help="boundary Poincare constants: estimates and bounds")
class BoundaryCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--quantity", choices=QUANTITIES, required=True)
        parser.add_argument("--body", default=None)
        parser.add_argument("--degree", type=int, default=8)
        parser.add_argument(
            "--parity",
            choices=[item.value for item in Parity],
            default=Parity.EVEN.value,
        )
        parser.add_argument("--samples", type=int, default=WEINGARTEN_SAMPLES)
        parser.add_argument(
            "--polygonize",
            type=int,
            default=None,
            help="inscribed polygon vertex count",
        )
        parser.add_argument("--u", default=None, help="test function name or polynomial")
        parser.add_argument("--psi", default=None, help="polynomial whose trace is Psi")
        _add_domain_argument(parser)
        parser.add_argument("--p", type=float, default=0.0)
        for name in ("r", "c-poin", "c-che", "max-hess", "w-range", "q"):
            parser.add_argument(f"--{name}", type=float, default=None)
        parser.add_argument("--R", dest="big_r", type=float, default=None)
        parser.add_argument("--n", type=int, default=None)
        parser.add_argument("--k", type=int, default=None)

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        result = _boundary_quantity(args)
        return result.to_dict() if isinstance(result, BoundReport) else result


@router.register("stability", help="stability margins and deficits of body pairs")
class StabilityCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--body-k", "--bodyK", dest="body_k", default=None)
        parser.add_argument("--body-l", "--bodyL", dest="body_l", default=None)
        parser.add_argument("--p", default="auto", help="'auto' uses p*(K)")
        parser.add_argument("--deficits", action="store_true")
        parser.add_argument("--bonnesen", action="store_true")
        parser.add_argument("--corpus", default=None, help="random:seed=<u64>,count=<k>")
        _add_grid_arguments(parser)

    @staticmethod
    def _p(text: str) -> float | None:
        if text == "auto":
            return None
        try:
            return float(text)
        except ValueError as exc:
            msg = f"--p must be 'auto' or a number, got {text!r}"
            raise InputError(msg) from exc

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        grid = _grid(args)
        p = StabilityCommand._p(args.p)
        if args.corpus is not None:
            from tasks.sweeps import sweep_corpus

            seed, count = parse_corpus(args.corpus, default_seed=args.seed)
            rows = sweep_corpus(
                seed,
                count,
                p,
                grid=args.grid,
                deficits=args.deficits,
                bonnesen=args.bonnesen,
            )
            return {"rows": rows, **grid.metadata()}
        if args.body_k is None or args.body_l is None:
            msg = "stability needs --body-k and --body-l, or --corpus"
            raise InputError(msg)
        report = stability_report(
            _body(args.body_k, grid),
            _body(args.body_l, grid),
            grid,
            p,
            with_deficits=args.deficits,
            with_bonnesen=args.bonnesen,
        )
        return {**report.to_dict(), **grid.metadata()}


@router.register(
    "steklov",
    help="second Steklov eigenvalue of the ball on degree-k harmonics",
)
class SteklovCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--k", type=int, required=True)

    @staticmethod
    def evaluate(n: int, k: int) -> dict[str, Any]:
        return {
            "n": n,
            "k": k,
            "eigenvalue": closed_forms.steklov_ball_eigenvalue(n, k),
            "bh_ball": closed_forms.bh_ball(n),
            "direction": BoundDirection.EXACT.value,
        }

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        return SteklovCommand.evaluate(args.n, args.k)


@router.register("reilly", help="residual of the Reilly identity for a polynomial")
class ReillyCommand:
    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None:
        _add_domain_argument(parser)
        parser.add_argument("--u", required=True, help="polynomial in x and y")

    @staticmethod
    def evaluate(domain: str, text: str) -> dict[str, Any]:
        u = parse_polynomial(text)
        lhs, rhs = reilly_sides(domain, u)
        return {
            "domain": domain,
            "u": u.describe(),
            "lhs": lhs,
            "rhs": rhs,
            "residual": abs(lhs - rhs),
        }

    @staticmethod
    def handle(args: argparse.Namespace) -> dict[str, Any]:
        return ReillyCommand.evaluate(args.domain, args.u)
