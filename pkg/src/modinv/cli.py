"""``mipf`` command line: build, verify and extend modular invariants.

Exit status: 0 pass, 1 verification failure (residuals on stderr), 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import characters, extension, fusion, invariants
from .numerics import Tolerance, frac_str
from .spectra import InvariantViolation, TheoryId, modular_data, modular_data_to_json

DEFAULT_QORDER = 12


class VerificationFailure(Exception):
    pass


class InvalidInput(Exception):
    pass


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args) -> Tolerance:
    if args.tol is not None:
        return Tolerance(args.tol)
    return Tolerance(float(os.environ.get("MIPF_TOL", "1e-9")))


def _qorder(args) -> int:
    if args.qorder is not None:
        return args.qorder
    return int(os.environ.get("MIPF_QORDER", DEFAULT_QORDER))


def _theory(args, required=True):
    if args.theory is None:
        if required:
            raise InvalidInput("--theory is required (e.g. D2:9, B2:4, orb:6, u1:6)")
        return None
    return TheoryId.parse(args.theory)


def _build(args, tol) -> invariants.Mipf:
    builder = args.builder
    if builder is None:
        raise InvalidInput("--builder/--family is required")
    t = _theory(args, required=builder in ("sc", "diag", "conj"))
    if builder == "dinv":
        if args.rtilde is None or args.m is None:
            raise InvalidInput("dinv needs --rtilde and --m")
        fam = t.family if t else "D2"
        m = invariants.build_dinv(args.rtilde, args.m, fam)
        if t and t != m.theory:
            raise InvalidInput(f"--theory {t} does not match rtilde*M^2 = {m.theory.param}")
        return m
    if builder == "scinv":
        if t is None:
            raise InvalidInput("scinv needs --theory D2:r or orb:r with 4 | r")
        return invariants.build_scinv(t.param, t.family)
    if builder == "bseries":
        if args.ltilde is None or args.m is None:
            raise InvalidInput("bseries needs --ltilde and --m")
        return invariants.build_b_series(args.ltilde, args.m, literal=args.literal_subscripts)
    md = modular_data(t, tol)
    if builder == "diag":
        return invariants.diagonal(md)
    if builder == "conj":
        return invariants.charge_conjugation(md)
    if builder == "sc":
        if args.current is None:
            raise InvalidInput("sc needs --current")
        return invariants.simple_current_invariant(md, args.current)
    raise InvalidInput(f"unknown builder {builder!r}")


def _load_or_build(args, tol) -> invariants.Mipf:
    if args.inp:
        with open(args.inp, encoding="utf-8") as fh:
            return invariants.Mipf.from_json(json.load(fh))
    return _build(args, tol)


def cmd_spectrum(args, tol):
    t = _theory(args)
    md = modular_data(t, tol)
    rows = [{"label": lab, "h": frac_str(h), "qdim": float(d)}
            for lab, h, d in zip(md.labels, md.h, md.quantum_dimensions())]
    doc = {"theory": str(t), "c": frac_str(md.c), "primaries": rows}
    if t.family in ("u1", "orb"):
        order = _qorder(args)
        doc["characters"] = {
            lab: {"leading": frac_str(ch.leading), "step": frac_str(ch.step), "coefficients": list(map(int, ch.coeffs))}
            for lab, ch in zip(md.labels, characters.characters(t, order))
        }
    _emit(args, doc)


def cmd_smatrix(args, tol):
    _emit(args, modular_data_to_json(modular_data(_theory(args), tol)))


def cmd_fusion(args, tol):
    _emit(args, fusion.verlinde(modular_data(_theory(args), tol), tol).to_csv())


def cmd_build(args, tol):
    _emit(args, _build(args, tol).to_json())


def cmd_verify(args, tol):
    m = _load_or_build(args, tol)
    md = modular_data(m.theory, tol)
    rep = invariants.verify(md, m, tol)
    _emit(args, {"theory": str(m.theory), "builder": m.builder, **rep.to_json()})
    if not rep.passed:
        raise VerificationFailure("; ".join(rep.failures()))


def cmd_search(args, tol):
    md = modular_data(_theory(args), tol)
    found = invariants.automorphism_search(md, tol)
    galex = invariants.galex_sublist(md, found)
    worst = 0.0
    out = []
    for m in found:
        rep = invariants.verify(md, m, tol)
        worst = max(worst, rep.commutes_with_S, rep.commutes_with_T)
        out.append({
            "permutation": [md.labels[i] for i in m.permutation()],
            "tensor_multipliers": invariants.tensor_multipliers(md, m),
            "residual": max(rep.commutes_with_S, rep.commutes_with_T),
        })
    _emit(args, {"theory": str(md.theory), "count": len(found), "galex_count": len(galex),
                 "max_residual": worst, "invariants": out})
    if worst > tol.eps:
        raise VerificationFailure(f"search result with commutation residual {worst:.3e}")


def cmd_extend(args, tol):
    m = _load_or_build(args, tol)
    ext = extension.extend(m, tol)
    _emit(args, {
        "parent": str(m.theory),
        "block_count": len(ext.decomposition.blocks),
        "multiplicities": list(ext.decomposition.multiplicities),
        "s_residual": ext.s_residual,
        "labels": list(ext.labels),
        "h": [frac_str(h) for h in ext.h],
        "S": [[[float(z.real), float(z.imag)] for z in row] for row in ext.S],
    })


def cmd_clone_check(args, tol):
    if args.rtilde is None or args.m is None:
        raise InvalidInput("clone-check needs --rtilde and --m")
    fam = _theory(args, required=False).family if args.theory else "D2"
    rep = extension.clone_check(args.rtilde, args.m, fam, tol)
    _emit(args, rep.to_json())
    if not rep.passed:
        raise VerificationFailure(
            f"clone check failed: iso={rep.iso_found} s_match_residual={rep.s_match_residual:.3e} "
            f"t_match={rep.t_match} spinor_difference={rep.spinor_weight_difference}")


def cmd_meromorphic(args, tol):
    if args.m is None:
        raise InvalidInput("meromorphic needs --m")
    rep = extension.meromorphic_chain(args.m, args.ltilde or 1, tol)
    _emit(args, rep.to_json())
    if not rep.passed:
        raise VerificationFailure(f"meromorphic chain ended with {rep.final_count} primaries")


def cmd_zcompare(args, tol):
    m = _load_or_build(args, tol)
    md = modular_data(m.theory, tol)
    cutoff = Fraction(args.cutoff)
    z = characters.z_from_mipf(md, m, cutoff)
    if args.radius:
        pq = Fraction(args.radius)
        geo = characters.geometric_orbifold_spectrum if md.theory.family == "orb" else characters.geometric_circle_spectrum
        ref = geo(pq.numerator, pq.denominator, cutoff)
        against = f"geometric R^2 = 2*{frac_str(pq)}"
    elif args.against:
        other = modular_data(TheoryId.parse(args.against), tol)
        ref = characters.z_from_mipf(other, invariants.diagonal(other), cutoff)
        against = f"diagonal {args.against}"
    else:
        _emit(args, z.to_csv())
        return
    diff = z.difference(ref)
    _emit(args, {"theory": str(md.theory), "against": against, "cutoff": frac_str(cutoff),
                 "states": z.total(), "equal": not diff,
                 "difference": [[frac_str(a), frac_str(b), d] for (a, b), d in list(diff.items())[:20]]})
    if diff:
        raise VerificationFailure(f"spectra differ at {len(diff)} (h_L, h_R) points")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "smatrix": cmd_smatrix,
    "fusion": cmd_fusion,
    "build": cmd_build,
    "verify": cmd_verify,
    "search": cmd_search,
    "extend": cmd_extend,
    "clone-check": cmd_clone_check,
    "meromorphic": cmd_meromorphic,
    "zcompare": cmd_zcompare,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mipf", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--theory", help="family:param, e.g. D2:9, B2:4, orb:6, u1:6")
    p.add_argument("--builder", "--family", dest="builder",
                   choices=["dinv", "scinv", "bseries", "sc", "diag", "conj"])
    p.add_argument("--rtilde", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--ltilde", type=int)
    p.add_argument("--current", help="label of the simple current for --builder sc")
    p.add_argument("--tol", type=float, help="verification tolerance (env MIPF_TOL, default 1e-9)")
    p.add_argument("--qorder", type=int, help="q-series order (env MIPF_QORDER, default 12)")
    p.add_argument("--cutoff", default="6", help="h_L + h_R cutoff for zcompare")
    p.add_argument("--radius", help="zcompare against the geometric spectrum at R^2 = 2p/q, given as p/q")
    p.add_argument("--against", help="zcompare against the diagonal spectrum of this theory")
    p.add_argument("--in", dest="inp", help="read a Mipf JSON file instead of building one")
    p.add_argument("--out", help="write the artifact here instead of stdout")
    p.add_argument("--literal-subscripts", action="store_true",
                   help="bseries: use the literal m*L*M subscripts (refused with an explanation)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        tol = _tol(args)
        COMMANDS[args.command](args, tol)
    except (VerificationFailure, InvariantViolation, fusion.FusionError, extension.ExtensionError,
            extension.FixedPointResolutionRequired, extension.AutomorphismTypeError) as e:
        print(f"mipf {args.command}: FAIL: {e}", file=sys.stderr)
        return 1
    except (InvalidInput, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"mipf {args.command}: invalid input: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
