"""Command line front end: exact JSON in, exact JSON out.

Every number crossing the process boundary is a decimal string (or a
dyadic {"re_num", "im_num", "exp"} record), never a binary float, so
outputs round-trip bit-exactly and reruns with the same inputs, seed, and
constants produce byte-identical files for any --threads value.

Exit codes: 0 success, 2 a NotPSD certificate was produced (the run
*worked*; the input just is not PSD), 1 any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpq, mpz

from .certify import factor_residual, jnf_residual, kappa_ceilings
from .frobenius import frobenius_form
from .jnf import (
    DEFAULT_BPRIME_CONSTANT,
    ApproxJNF,
    JordanBlockSpec,
    jnf,
    jnf_rational,
)
from .linalg import DyadicComplexMatrix, IntMatrix, RatMatrix, max_norm
from .polynomials import IntPolynomial
from .rootfinder import approx_roots_with_mults, min_working_bits
from .scalars import DyadicComplex
from .specfact import (
    DEFAULT_BPP_CONSTANT,
    DEFAULT_REAL_THRESHOLD_CONSTANT,
    MatrixPolynomial,
    NotPsdCertificate,
    SpectralFactor,
    nonmonic_spectral_factor,
    spectral_factor,
)

__all__ = ["RunConfig", "parse_input", "emit_output", "selftest", "main"]

logger = logging.getLogger("jordanforge")


@dataclass
class RunConfig:
    """Validated knobs for one run."""

    command: str
    bits: int = 64
    c_bprime: int = DEFAULT_BPRIME_CONSTANT
    c_bpp: int = DEFAULT_BPP_CONSTANT
    c_real: int = DEFAULT_REAL_THRESHOLD_CONSTANT
    input: Optional[str] = None
    output: Optional[str] = None
    seed: int = 0
    check: bool = False
    threads: int = 1
    nonmonic_v: Optional[str] = None
    run_file: Optional[str] = None

    def validate(self) -> None:
        if self.command not in {"jnf", "roots", "frobenius", "specfact", "verify", "selftest"}:
            raise ValueError(f"unknown command {self.command!r}")
        if self.bits < 1:
            raise ValueError("--bits must be >= 1")
        for name, value in (
            ("--bprime-constant", self.c_bprime),
            ("--bpp-constant", self.c_bpp),
            ("--real-threshold-constant", self.c_real),
        ):
            if value < 1:
                raise ValueError(f"{name} must be a positive integer (got {value})")
        if self.threads < 1:
            raise ValueError("--threads must be >= 1")


# ---------------------------------------------------------------------------
# Parsing: decimal strings only, exactness preserved.
# ---------------------------------------------------------------------------


def _parse_scalar(s):
    """ "3", "3/4", or ["re", "im"] -> (mpq re, mpq im)."""
    if isinstance(s, (list, tuple)):
        if len(s) != 2:
            raise ValueError(f"complex entry must be a [re, im] pair, got {s!r}")
        return (_parse_rat(s[0]), _parse_rat(s[1]))
    return (_parse_rat(s), mpq(0))


def _parse_rat(s) -> mpq:
    if isinstance(s, int):
        return mpq(s)
    if not isinstance(s, str):
        raise ValueError(f"numbers must be decimal strings, got {type(s).__name__}")
    return mpq(s)


def _parse_matrix_entries(entries, den=None) -> RatMatrix:
    rows = []
    width = None
    for r in entries:
        row = [_parse_scalar(x) for x in r]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError("inconsistent row lengths in matrix")
        rows.append(row)
    m = RatMatrix.from_rows(rows)
    if den is not None:
        m = m.scale(mpq(1, _parse_rat(den)))
    return m


def parse_input(path_or_obj):
    """Parse an input JSON file (or pre-loaded dict) into a pipeline object."""
    if isinstance(path_or_obj, dict):
        doc = path_or_obj
    else:
        with open(path_or_obj, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    kind = doc.get("kind")
    if kind == "int_matrix":
        m = _parse_matrix_entries(doc["entries"])
        if not m.is_integral():
            raise ValueError("int_matrix entries must be integers")
        return m
    if kind == "rat_matrix":
        return _parse_matrix_entries(doc["entries"], doc.get("den"))
    if kind == "int_poly":
        coeffs = [mpz(c) for c in doc["coeffs"]]
        return IntPolynomial(coeffs)
    if kind == "matrix_poly":
        n = int(doc["n"])
        degree = int(doc["degree"])
        raw = doc["coeffs"]
        if len(raw) != degree:
            raise ValueError(
                f"matrix_poly must list coefficients 0..degree-1 ({degree}), got {len(raw)}"
            )
        coeffs = []
        for k, grid in enumerate(raw):
            m = _parse_matrix_entries(grid)
            if m.rows != n or m.cols != n:
                raise ValueError(f"coefficient {k} is not {n}x{n}")
            coeffs.append(m)
        leading = None
        if "leading" in doc and doc["leading"] is not None:
            leading = _parse_matrix_entries(doc["leading"])
        p = MatrixPolynomial(coeffs, leading=leading)
        for k, c in enumerate(p.all_coeffs()):
            if not c.is_hermitian():
                bad = _first_non_hermitian_entry(c)
                raise ValueError(
                    f"coefficient {k} is not Hermitian (first offending entry at {bad})"
                )
        if p.degree % 2:
            raise ValueError("factorization input must have even degree")
        return p
    raise ValueError(f"unknown input kind {kind!r}")


def _first_non_hermitian_entry(m: RatMatrix):
    for i in range(m.rows):
        for j in range(i, m.cols):
            a = m.entry(i, j)
            b = m.entry(j, i)
            if a.re != b.re or a.im != -b.im:
                return (i, j)
    return None


# ---------------------------------------------------------------------------
# Emission.
# ---------------------------------------------------------------------------


def _rat_matrix_json(m: RatMatrix) -> dict:
    return {
        "kind": "rat_matrix",
        "den": str(m.den),
        "entries": [
            [
                [str(m.re[i][j]), str(m.im[i][j])]
                for j in range(m.cols)
            ]
            for i in range(m.rows)
        ],
        "entries_are_numerators": True,
    }


def _rat_matrix_from_json(d: dict) -> RatMatrix:
    den = mpz(d["den"])
    rows = [
        [(mpq(e[0]), mpq(e[1])) for e in row]
        for row in d["entries"]
    ]
    return RatMatrix.from_rows(rows).scale(mpq(1, den))


def _dyadic_matrix_json(m: DyadicComplexMatrix) -> dict:
    """Entrywise normalized {"re_num","im_num","exp"} records.

    Normalizing strips shared powers of two, so exact integers read as
    themselves; re-aligning to a common exponent on parse is exact, so the
    round trip preserves every value bit for bit.
    """
    return {
        "kind": "dyadic_matrix",
        "entries": [
            [m.entry(i, j).normalized().to_json_dict() for j in range(m.cols)]
            for i in range(m.rows)
        ],
    }


def _dyadic_matrix_from_json(d: dict) -> DyadicComplexMatrix:
    grid = [[DyadicComplex.from_json_dict(e) for e in row] for row in d["entries"]]
    exp = max((x.exp for row in grid for x in row), default=0)
    return DyadicComplexMatrix(
        [[x.re_num << (exp - x.exp) for x in row] for row in grid],
        [[x.im_num << (exp - x.exp) for x in row] for row in grid],
        exp,
    )


def _jnf_json(run: ApproxJNF, check: bool) -> dict:
    doc = {
        "kind": "jnf",
        "n": run.dimension,
        "accuracy_bits": run.accuracy_bits,
        "working_bits": run.working_bits,
        "eigen_den": str(run.eigen_den),
        "blocks": [
            {
                "eigenvalue": b.eigenvalue.normalized().to_json_dict(),
                "size": b.size,
                "source_block": b.source_block,
            }
            for b in run.blocks
        ],
        "v_hat": _dyadic_matrix_json(run.v_hat),
    }
    if check:
        diag = run.diagnostics
        lo, hi = diag["kappa_V_enclosure"]
        doc["diagnostics"] = {
            "residual_max_norm": str(diag["residual_max_norm"]),
            "kappa_V_enclosure": [str(lo), str(hi)],
        }
    return doc


def _jnf_from_json(doc: dict, original: Optional[RatMatrix]) -> ApproxJNF:
    blocks = [
        JordanBlockSpec(
            eigenvalue=DyadicComplex.from_json_dict(b["eigenvalue"]),
            size=int(b["size"]),
            source_block=int(b.get("source_block", 0)),
        )
        for b in doc["blocks"]
    ]
    return ApproxJNF(
        blocks,
        _dyadic_matrix_from_json(doc["v_hat"]),
        accuracy_bits=int(doc["accuracy_bits"]),
        working_bits=int(doc["working_bits"]),
        eigen_den=mpz(doc["eigen_den"]),
        _input=original,
    )


def _roots_json(clusters, working_bits: int) -> dict:
    return {
        "kind": "roots",
        "working_bits": working_bits,
        "clusters": [
            {"value": c.value.normalized().to_json_dict(), "multiplicity": c.multiplicity}
            for c in clusters
        ],
    }


def _factor_json(run: SpectralFactor, check: bool) -> dict:
    doc = {
        "kind": "spectral_factor",
        "n": run.n,
        "degree": run.degree,
        "accuracy_bits": run.accuracy_bits,
        "working_bits": run.working_bits,
        "coeffs": [_dyadic_matrix_json(c) for c in run.coeffs],
        "leading": None if run.leading is None else _rat_matrix_json(run.leading),
    }
    if check:
        diag = run.diagnostics
        lo, hi = diag["kappa_Vge_enclosure"]
        doc["diagnostics"] = {
            "factor_residual": str(diag["factor_residual"]),
            "kappa_Vge_enclosure": [str(lo), str(hi)],
        }
    return doc


def _factor_from_json(doc: dict, original: Optional[MatrixPolynomial]) -> SpectralFactor:
    leading = None
    if doc.get("leading") is not None:
        leading = _rat_matrix_from_json(doc["leading"])
    return SpectralFactor(
        [_dyadic_matrix_from_json(c) for c in doc["coeffs"]],
        accuracy_bits=int(doc["accuracy_bits"]),
        working_bits=int(doc["working_bits"]),
        leading=leading,
        _input_poly=original,
    )


def _certificate_json(cert: NotPsdCertificate) -> dict:
    return {
        "kind": "not_psd_certificate",
        "reason": cert.reason,
        "real_eigenvalue": cert.real_eigenvalue.normalized().to_json_dict(),
        "block_size": cert.block_size,
        "eigen_den": str(cert.companion_jnf_reference.eigen_den),
    }


def emit_output(doc: dict, path: Optional[str]) -> str:
    """Serialize with stable key order; write to path or stdout. Returns the text."""
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return text


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def _cmd_jnf(cfg: RunConfig) -> int:
    m = parse_input(cfg.input)
    if not isinstance(m, RatMatrix):
        raise ValueError("jnf expects an int_matrix or rat_matrix input")
    if m.is_integral():
        run = jnf(m, cfg.bits, c_bprime=cfg.c_bprime, threads=cfg.threads)
    else:
        den = m.den
        run = jnf_rational(
            m.scale(den), den, cfg.bits, c_bprime=cfg.c_bprime, threads=cfg.threads
        )
        logger.info("rational input: running on numerators over den=%s", den)
    emit_output(_jnf_json(run, cfg.check), cfg.output)
    return 0


def _cmd_roots(cfg: RunConfig) -> int:
    p = parse_input(cfg.input)
    if not isinstance(p, IntPolynomial):
        raise ValueError("roots expects an int_poly input")
    b_eff = max(cfg.bits, min_working_bits(p)) if p.degree >= 1 else cfg.bits
    if b_eff != cfg.bits:
        logger.info("raising working precision to the admissible minimum %d", b_eff)
    clusters = approx_roots_with_mults(p, b_eff)
    emit_output(_roots_json(clusters, b_eff), cfg.output)
    return 0


def _cmd_frobenius(cfg: RunConfig) -> int:
    m = parse_input(cfg.input)
    if not isinstance(m, RatMatrix) or not m.is_integral():
        raise ValueError("frobenius expects an integral matrix input")
    fr = frobenius_form(m)
    doc = {
        "kind": "frobenius",
        "blocks": [[str(c) for c in blk.poly.coeffs] for blk in fr.blocks],
        "u": _rat_matrix_json(fr.U),
        "u_inv": _rat_matrix_json(fr.U_inv),
    }
    emit_output(doc, cfg.output)
    return 0


def _cmd_specfact(cfg: RunConfig) -> int:
    p = parse_input(cfg.input)
    if not isinstance(p, MatrixPolynomial):
        raise ValueError("specfact expects a matrix_poly input")
    if cfg.nonmonic_v:
        v = parse_input(cfg.nonmonic_v)
        if not isinstance(v, RatMatrix):
            raise ValueError("--nonmonic-v must point at a matrix input")
        out = nonmonic_spectral_factor(
            p.all_coeffs(),
            v,
            cfg.bits,
            c_bpp=cfg.c_bpp,
            c_real=cfg.c_real,
            threads=cfg.threads,
        )
    else:
        if not p.monic:
            raise ValueError("non-monic input needs --nonmonic-v FILE with V V* = leading")
        out = spectral_factor(
            p,
            cfg.bits,
            c_bpp=cfg.c_bpp,
            c_real=cfg.c_real,
            c_bprime=cfg.c_bprime,
            threads=cfg.threads,
        )
    if isinstance(out, NotPsdCertificate):
        emit_output(_certificate_json(out), cfg.output)
        return 2
    emit_output(_factor_json(out, cfg.check), cfg.output)
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    original = parse_input(cfg.input)
    with open(cfg.run_file, "r", encoding="utf-8") as fh:
        run_doc = json.load(fh)
    kind = run_doc.get("kind")
    if kind == "jnf":
        if not isinstance(original, RatMatrix):
            raise ValueError("verify jnf needs the original matrix as --input")
        den = mpz(run_doc["eigen_den"])
        numerator_matrix = original if den == 1 else original.scale(den)
        run = _jnf_from_json(run_doc, numerator_matrix)
        resid = jnf_residual(numerator_matrix, run)
        report = kappa_ceilings(run)
        v = run.v_hat.to_rat()
        n = run.dimension
        tol = (
            mpq(1, mpz(1) << run.accuracy_bits)
            * n
            * n
            * max(max_norm(v), 1)
            * max(max_norm(run._j_numerator_rational()), 1)
        )
        ok = resid <= tol and report.passed
        doc = report.to_json_dict()
        doc["kind"] = "diagnostics_report"
        doc["residual_max_norm"] = str(resid)
        doc["residual_tolerance"] = str(tol)
        doc["pass"] = bool(ok)
        emit_output(doc, cfg.output)
        return 0 if ok else 1
    if kind == "spectral_factor":
        if not isinstance(original, MatrixPolynomial):
            raise ValueError("verify spectral_factor needs the original matrix_poly as --input")
        run = _factor_from_json(run_doc, original)
        resid = factor_residual(original, run)
        tol = mpq(1, mpz(1) << max(run.accuracy_bits - 8, 1)) * max(original.max_norm(), 1)
        ok = resid <= tol
        doc = {
            "kind": "diagnostics_report",
            "residual_max_norm": str(resid),
            "residual_tolerance": str(tol),
            "kappa_enclosures": run_doc.get("diagnostics", {}),
            "pass": bool(ok),
        }
        emit_output(doc, cfg.output)
        return 0 if ok else 1
    if kind == "not_psd_certificate":
        doc = {
            "kind": "diagnostics_report",
            "certificate": run_doc,
            "pass": True,
        }
        emit_output(doc, cfg.output)
        return 0
    raise ValueError(f"cannot verify run kind {kind!r}")


# ---------------------------------------------------------------------------
# Self test: built-in contract instances with a residual table.
# ---------------------------------------------------------------------------


def _selftest_instances(seed: int):
    rng = random.Random(seed)
    yield "jnf [[1,1],[0,1]] exact", _selftest_jnf, IntMatrix([[1, 1], [0, 1]]), mpq(0)
    yield "jnf diag(1,2) exact", _selftest_jnf, IntMatrix([[1, 0], [0, 2]]), mpq(0)
    tol = mpq(1, mpz(1) << 60)
    yield "jnf companion x^2-2", _selftest_jnf, IntMatrix([[0, 2], [1, 0]]), tol
    yield "jnf zeros 3x3 exact", _selftest_jnf, IntMatrix([[0] * 3] * 3), mpq(0)
    a = IntMatrix([[rng.randint(-8, 8) for _ in range(4)] for _ in range(4)])
    yield "jnf random 4x4", _selftest_jnf, a, None
    yield "roots x^2-2", _selftest_roots, IntPolynomial([-2, 0, 1]), None
    yield "specfact x^2 exact", _selftest_factor, MatrixPolynomial.from_scalars([0, 0]), mpq(0)
    yield "specfact x^2+1 exact", _selftest_factor, MatrixPolynomial.from_scalars([1, 0]), mpq(0)
    yield "specfact (x-1)^2 exact", _selftest_factor, MatrixPolynomial.from_scalars([1, -2]), mpq(0)
    yield "specfact x^2-1 certificate", _selftest_notpsd, MatrixPolynomial.from_scalars([-1, 0]), None


def _selftest_jnf(m, tol, cfg: RunConfig):
    run = jnf(m, cfg.bits, c_bprime=cfg.c_bprime, threads=cfg.threads)
    resid = run.diagnostics["residual_max_norm"]
    n = m.rows
    v = run.v_hat.to_rat()
    ceiling = (
        mpq(1, mpz(1) << cfg.bits)
        * n
        * n
        * max(max_norm(v), 1)
        * max(max_norm(run._j_numerator_rational()), 1)
    )
    limit = ceiling if tol is None else max(tol, mpq(0))
    return resid, limit, resid <= limit


def _selftest_roots(p, _tol, cfg: RunConfig):
    b_eff = max(cfg.bits, min_working_bits(p))
    clusters = approx_roots_with_mults(p, b_eff)
    total = sum(c.multiplicity for c in clusters)
    ok = total == p.degree
    worst = mpq(0)
    for c in clusters:
        r, i = c.value.as_rational_pair()
        err = abs(r * r + i * i - 2) if p.coeffs == (mpz(-2), mpz(0), mpz(1)) else mpq(0)
        worst = max(worst, err)
    limit = mpq(1, mpz(1) << (cfg.bits - 4))
    return worst, limit, ok and worst <= limit


def _selftest_factor(p, tol, cfg: RunConfig):
    out = spectral_factor(p, cfg.bits, c_bpp=cfg.c_bpp, c_real=cfg.c_real, threads=cfg.threads)
    if isinstance(out, NotPsdCertificate):
        return mpq(1), mpq(0), False
    resid = out.diagnostics["factor_residual"]
    limit = (
        tol
        if tol is not None
        else mpq(1, mpz(1) << (cfg.bits - 8)) * max(p.max_norm(), 1)
    )
    return resid, limit, resid <= limit


def _selftest_notpsd(p, _tol, cfg: RunConfig):
    out = spectral_factor(p, cfg.bits, c_bpp=cfg.c_bpp, c_real=cfg.c_real, threads=cfg.threads)
    ok = isinstance(out, NotPsdCertificate) and out.block_size % 2 == 1
    return mpq(0 if ok else 1), mpq(0), ok


def selftest(cfg: RunConfig) -> int:
    """Run the built-in instances; print name, residual, tolerance, verdict."""
    rows = []
    all_ok = True
    for name, fn, arg, tol in _selftest_instances(cfg.seed):
        try:
            resid, limit, ok = fn(arg, tol, cfg)
        except Exception as e:  # noqa: BLE001 - report, do not crash the table
            rows.append((name, "error", repr(e), False))
            all_ok = False
            continue
        rows.append((name, str(resid), str(limit), ok))
        all_ok = all_ok and ok
    width = max(len(r[0]) for r in rows)
    out = sys.stdout
    for name, resid, limit, ok in rows:
        verdict = "PASS" if ok else "FAIL"
        shown_r = resid if len(resid) <= 28 else resid[:25] + "..."
        shown_l = limit if len(limit) <= 28 else limit[:25] + "..."
        out.write(f"{name:<{width}}  residual={shown_r:<28} tol={shown_l:<28} {verdict}\n")
    out.write("selftest: {}\n".format("all passed" if all_ok else "FAILURES PRESENT"))
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# Entry point.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jordanforge",
        description="Certified approximate Jordan forms and spectral factorizations "
        "of exact integer/rational inputs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, needs_input in (
        ("jnf", True),
        ("roots", True),
        ("frobenius", True),
        ("specfact", True),
        ("verify", True),
        ("selftest", False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--bits", type=int, default=64)
        p.add_argument("--input", type=str, default=None, required=needs_input)
        p.add_argument("--output", type=str, default=None)
        p.add_argument("--check", action="store_true")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--bprime-constant", type=int, default=DEFAULT_BPRIME_CONSTANT)
        p.add_argument("--bpp-constant", type=int, default=DEFAULT_BPP_CONSTANT)
        p.add_argument(
            "--real-threshold-constant", type=int, default=DEFAULT_REAL_THRESHOLD_CONSTANT
        )
        if name == "specfact":
            p.add_argument("--nonmonic-v", type=str, default=None)
        if name == "verify":
            p.add_argument("run_file", type=str)
    return ap


def main(argv=None) -> int:
    level = os.environ.get("JORDANFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    try:
        ns = _build_parser().parse_args(argv)
        cfg = RunConfig(
            command=ns.command,
            bits=ns.bits,
            c_bprime=ns.bprime_constant,
            c_bpp=ns.bpp_constant,
            c_real=ns.real_threshold_constant,
            input=ns.input,
            output=ns.output,
            seed=ns.seed,
            check=ns.check,
            threads=ns.threads,
            nonmonic_v=getattr(ns, "nonmonic_v", None),
            run_file=getattr(ns, "run_file", None),
        )
        cfg.validate()
        if cfg.command == "jnf":
            return _cmd_jnf(cfg)
        if cfg.command == "roots":
            return _cmd_roots(cfg)
        if cfg.command == "frobenius":
            return _cmd_frobenius(cfg)
        if cfg.command == "specfact":
            return _cmd_specfact(cfg)
        if cfg.command == "verify":
            return _cmd_verify(cfg)
        return selftest(cfg)
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError, AssertionError) as e:
        logger.debug("fatal error", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
