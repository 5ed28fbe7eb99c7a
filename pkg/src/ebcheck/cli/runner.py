"""Execute the analyses of a parsed problem file."""
import time
from dataclasses import dataclass

import numpy as np

from .. import certificates as cert
from .. import epigraph as epi
from .. import errorbound as eb
from .. import functions as fn
from .._config import DEFAULT_TOL
from ..exceptions import EBError
from .parser import literal
from .report import RunReport, Section, fmt

CERT_HEADER = ["condition", "tau", "verdict", "n_witnesses"]


@dataclass
class Overrides:
    seed: int = None
    budget: float = 1.0
    tol: float = None


class _Params:
    """Typed access to ``key=value`` analysis parameters."""

    def __init__(self, pf, analysis):
        self.pf = pf
        self.raw = analysis.params
        self.line = analysis.line

    def func(self, key="objective", default="objective"):
        name = self.raw[key].name if key in self.raw else default
        return self.pf.lookup(name)

    def map(self, key="map"):
        return self.pf.lookup(self.raw[key].name)

    def value(self, key, default=None):
        if key not in self.raw:
            return default
        return literal(self.raw[key], self.line)

    def array(self, key, default=None):
        v = self.value(key, None)
        return default if v is None else np.asarray(v, dtype=float)

    def xbar(self, dim):
        return self.array("xbar", np.zeros(dim))


def _cert_rows(report):
    rows = [[report.condition_id, report.tau_used if report.tau_used is not None else "", report.verdict,
             len(report.witnesses)]]
    for w, res in report.witnesses:
        rows.append(["witness", res, *np.atleast_1d(w)])
    return rows


def _cert_lines(report):
    lines = [f"{report.condition_id}: {report.verdict}" + (f" at tau={fmt(report.tau_used)}" if report.tau_used else "")]
    lines += [f"witness {np.round(w, 6).tolist()} residual {fmt(r)}" for w, r in report.witnesses[:5]]
    lines += [f"note: {n}" for n in report.notes]
    return lines


class Runner:
    def __init__(self, pf, overrides=None):
        self.pf = pf
        self.ov = overrides or Overrides()
        meta_seed = pf.metadata.get("seed")
        self.seed = self.ov.seed if self.ov.seed is not None else int(meta_seed.value) if meta_seed else 0
        cert_tol = self.ov.tol
        if cert_tol is None and "tol" in pf.metadata:
            cert_tol = pf.metadata["tol"].value
        self.tol = DEFAULT_TOL if cert_tol is None else DEFAULT_TOL.with_cert(cert_tol)

    def n(self, base):
        return max(1, int(round(base * self.ov.budget)))

    # -- handlers ---------------------------------------------------------
    def modulus(self, p, sec):
        f = p.func()
        q = eb.ModulusQuery(
            p.xbar(f.dim), p.value("delta0", 0.5), int(p.value("levels", 8)),
            self.n(p.value("samples", 4096)), self.seed, p.value("rho", 1.25),
        )
        est = eb.estimate_modulus(f, q, self.tol)
        sec.header = ["level", "delta", "sup_ratio"] + [f"argmax_{i + 1}" for i in range(f.dim)]
        for lv in est.per_level:
            coords = lv.argmax if lv.argmax is not None else [np.nan] * f.dim
            sec.rows.append([lv.level, lv.delta, lv.sup_ratio, *coords])
        sec.rows.append(["verdict", est.verdict, "tau_hat", est.tau_hat])
        sec.lines.append(f"modulus: {est.verdict}, tau_hat = {fmt(est.tau_hat)}")
        sec.lines += [f"level {lv.level}: delta={fmt(lv.delta)} sup={fmt(lv.sup_ratio)}" for lv in est.per_level]
        sec.lines += [f"flag: {fl}" for fl in est.flags]

    def ratios(self, p, sec):
        f = p.func()
        X = np.atleast_2d(p.array("points"))
        labels = p.value("labels", list(range(len(X))))
        expected = p.value("expected", [np.nan] * len(X))
        S = f.solution_set()
        sec.header = ["label", "distance", "f_value", "ratio", "expected"]
        for lab, x, e in zip(labels, X, expected):
            d = S.distance(x, self.tol)
            fx = f.value(x)
            sec.rows.append([lab, d, fx, d / fx, e])
            sec.lines.append(f"{fmt(lab)}: d={fmt(d)} f={fmt(fx)} ratio={fmt(d / fx)} expected={fmt(e)}")

    def certify31(self, p, sec):
        f = p.func()
        r = cert.check_thm31(f, p.xbar(f.dim), self.tol)
        sec.header, sec.rows, sec.lines = CERT_HEADER, _cert_rows(r), _cert_lines(r)

    def certify33(self, p, sec):
        f = p.func()
        r = cert.check_thm33(f, p.xbar(f.dim), p.value("tau"), self.tol, n_dirs=self.n(10_000), seed=self.seed)
        sec.header, sec.rows, sec.lines = CERT_HEADER, _cert_rows(r), _cert_lines(r)

    def certify32(self, p, sec):
        f = p.func()
        r = cert.check_thm32(
            f, p.xbar(f.dim), p.value("tau"), p.value("delta0", 0.1), p.value("eps", 0.01),
            self.n(p.value("points", 32)), self.seed, self.n(p.value("pairs", 256)), self.tol,
        )
        sec.header, sec.rows, sec.lines = CERT_HEADER, _cert_rows(r), _cert_lines(r)

    def certify34(self, p, sec):
        g, psi = p.func("g", None), p.map()
        xbar = p.xbar(psi.dim)
        delta, npts = p.value("delta", 0.05), self.n(p.value("points", 16))
        r = cert.check_thm34(g, psi, xbar, p.value("tau"), delta, npts, self.seed, self.tol)
        star = cert.tau_star_search(g, psi, xbar, delta, npts, self.seed, tol=self.tol)
        sec.header, sec.rows, sec.lines = CERT_HEADER, _cert_rows(r), _cert_lines(r)
        sec.rows.append(["tau_star", star, "", ""])
        sec.lines.append(f"tau_star = {fmt(star)}")

    def equiv35(self, p, sec):
        g, psi = p.func("g", None), p.map()
        xbar = p.xbar(psi.dim)
        q = eb.ModulusQuery(xbar, p.value("delta0", 0.5), int(p.value("levels", 8)),
                            self.n(p.value("samples", 4096)), self.seed)
        r = cert.check_thm35(g, psi, xbar, q, tol=self.tol)
        sec.header = ["quantity", "value"]
        sec.rows = [
            ["verdict_f", r.verdict_f], ["verdict_g", r.verdict_g], ["tau_f", r.tau_f], ["tau_g", r.tau_g],
            ["kappa", r.kappa], ["kappa_transfer", r.kappa_transfer], ["lipschitz", r.lipschitz],
            ["verdicts_agree", r.agree], ["transfer_bound_ok", r.transfer_ok],
        ]
        sec.lines = [f"{k}: {fmt(v)}" for k, v in sec.rows]

    def lemma25(self, p, sec):
        f = p.func()
        z, r = p.array("z", np.zeros(f.dim)), p.value("r")
        rep = epi.check_lemma25(f, z, r, self.tol)
        sec.header = ["check", "holds", "detail"]
        sec.rows = [["frechet_inclusion", rep.frechet_holds, ""], ["limiting_inclusion", rep.limiting_holds, ""]]
        if rep.witness is not None:
            sec.rows.append(["witness", "", " ".join(fmt(c) for c in rep.witness)])
        probe = p.array("probe")
        if probe is not None:
            at_r = any(c.contains(probe, self.tol) for c in epi.epi_limiting_normal_cones(f, z, r, self.tol))
            at_fz = any(c.contains(probe, self.tol)
                        for c in epi.epi_limiting_normal_cones(f, z, f.value(z), self.tol))
            sec.rows.append(["probe_in_limiting_cone_at_r", at_r, " ".join(fmt(c) for c in probe)])
            sec.rows.append(["probe_in_limiting_cone_at_fz", at_fz, " ".join(fmt(c) for c in probe)])
        sec.lines = [f"{a}: {fmt(b)} {c}".rstrip() for a, b, c in sec.rows] + [f"note: {n}" for n in rep.notes]

    def ineq411(self, p, sec):
        f = p.func()
        rep = epi.check_inequality_411(
            f, p.value("tau"), p.xbar(f.dim), p.value("delta0", 0.1), self.n(p.value("samples", 10_000)),
            self.seed, p.array("points"), tol=self.tol,
        )
        sec.header = ["tau", "n_samples", "n_violations", "max_violation"]
        sec.rows = [[rep.tau, rep.n_samples, rep.n_violations, rep.max_violation]]
        if rep.witness is not None:
            sec.rows.append(["witness", rep.witness[1], *rep.witness[0]])
        sec.lines = [f"{rep.n_violations} violations in {rep.n_samples} samples, max {fmt(rep.max_violation)}"]

    def hoffman(self, p, sec):
        f = p.func()
        pieces = [f] if isinstance(f, fn.Affine) else getattr(f, "pieces", [])
        if not pieces or not all(isinstance(q, fn.Affine) for q in pieces):
            raise EBError("hoffman needs a maximum of affine functions")
        A = np.array([q.a for q in pieces])
        b = np.array([-q.b for q in pieces])
        H = eb.hoffman_constant(A, b)
        est = eb.estimate_modulus(f, eb.ModulusQuery(p.xbar(f.dim), seed=self.seed,
                                                     samples_per_level=self.n(4096)), self.tol)
        sec.header = ["quantity", "value"]
        sec.rows = [["hoffman_constant", H], ["tau_hat", est.tau_hat], ["verdict", est.verdict],
                    ["relative_gap", abs(est.tau_hat - H) / H if H else np.nan]]
        sec.lines = [f"{k}: {fmt(v)}" for k, v in sec.rows]

    # -- driver -------------------------------------------------------------
    def run(self):
        report = RunReport(seed=self.seed)
        for i, analysis in enumerate(self.pf.analyses):
            sec = Section(i, analysis.command, [])
            start = time.perf_counter()
            try:
                getattr(self, analysis.command)(_Params(self.pf, analysis), sec)
            except (EBError, ValueError, KeyError, TypeError) as exc:
                sec.error = f"analysis {i} ({analysis.command}, line {analysis.line}): {type(exc).__name__}: {exc}"
            sec.seconds = time.perf_counter() - start
            report.sections.append(sec)
        return report


def run(pf, overrides=None):
    return Runner(pf, overrides).run()
