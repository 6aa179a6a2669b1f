"""Command-line interface: ``nanofiber-fp <command> [flags]``.

Exit status: 0 success, 2 usage, 3 data/parse or domain error, 4 numerical
or fit failure. Every run prints a provenance block (JSON) on stderr and
embeds it in the files it writes.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import __version__
from . import cavity as cav
from . import cqed, io, spectra
from .constants import C0, CS_D2_FREQUENCY, CS_D2_GAMMA_OVER_2PI
from .errors import (
    AmbiguousRootError,
    DataFormatError,
    DomainError,
    FitFailureError,
    IncompleteModelError,
    InsufficientCalibrationError,
    NoGuidedModeError,
    RootAmbiguityWarning,
    ScanDirectionError,
)
from .fibermode import (
    FiberGeometry,
    effective_cross_section,
    is_single_mode,
    solve_he11,
    v_number,
)

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4


def _provenance(args, argv):
    return {
        "program": "nanofiber_fp",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
    }


def _emit(args, payload: dict, prov: dict) -> None:
    doc = {"result": payload, "provenance": prov}
    if args.output:
        io.write_json(args.output, doc)
    else:
        sys.stdout.write(io.dumps(payload))


def cmd_mode(args, prov):
    n1 = args.core_index
    if n1 is None:
        g = FiberGeometry.silica(args.diameter, args.wavelength, args.clad_index)
    else:
        g = FiberGeometry(args.diameter, n1, args.clad_index, args.wavelength)
    m = solve_he11(g)
    payload = {
        "diameter": g.diameter,
        "wavelength": g.wavelength,
        "core_index": g.core_index,
        "clad_index": g.clad_index,
        "v_number": v_number(g),
        "single_mode": is_single_mode(g),
        "n_eff": m.n_eff,
        "beta": m.beta,
        "residual": m.residual,
        "surface_intensity_ratio": m.surface_ratio,
        "effective_area_surface": effective_cross_section(m, "surface"),
        "other_roots": list(m.other_roots),
    }
    _emit(args, payload, prov)


def _model_from_args(args) -> cav.CavityModel:
    if args.model:
        return io.load_model(args.model)
    return cav.symmetric_model(
        args.finesse, args.fsr, tc2=args.tc2, mirror_loss=args.mirror_loss,
        birefringent_splitting=args.splitting,
        background_transmission=args.background,
        resonance_frequency=args.resonance,
    )


def cmd_synth(args, prov):
    model = _model_from_args(args)
    if args.raw:
        spec, _ = spectra.synth_raw_scan(
            model, args.nu_start, args.nu_stop, args.points, args.etalon_fsr,
            distortion=args.distortion, sigma=args.sigma, seed=args.seed,
            polarization=args.polarization,
        )
    else:
        spec = spectra.synth_spectrum(
            model, args.nu_start, args.nu_stop, args.points, args.sigma, args.seed,
            args.polarization, np.deg2rad(args.angle),
        )
    _write_spectrum(args, spec, prov)


def _write_spectrum(args, spec, prov):
    if not args.output:
        raise DomainError("--output is required for spectrum output")
    io.write_spectrum(args.output, spec, args.format or "csv", {"provenance": prov})


def cmd_calibrate(args, prov):
    spec = io.read_spectrum(args.input)
    result, cal = spectra.calibrate_axis(
        spec, args.etalon_fsr, args.reference_line, args.reference_position, args.direction
    )
    cal.metadata["calibration"] = {
        "anchor_frequency": result.anchor_frequency,
        "etalon_fsr": result.etalon_fsr,
        "residual_rms": result.residual_rms,
        "n_fringes": int(len(result.fringe_positions)),
    }
    _write_spectrum(args, cal, prov)


def cmd_fit(args, prov):
    spec = io.read_spectrum(args.input)
    if not spec.calibrated:
        raise DataFormatError("spectrum axis is not calibrated; run 'calibrate' first")
    if args.per_fsr:
        rows = spectra.finesse_vs_detuning(spec, args.channel, args.prominence, args.unit)
        payload = {"fits": [{"detuning": d, **f.as_dict()} for d, f in rows], "unit": args.unit}
    else:
        window = None if args.center is None else (args.center, args.span)
        fit = spectra.fit_airy(spec, window, channel=args.channel, fixed_fsr=args.fixed_fsr)
        payload = fit.as_dict()
    prov = {**prov, "input": args.input}
    _emit(args, payload, prov)


def cmd_loss(args, prov):
    tc2, sigma = cav.taper_transmission_uncertainty(args.f0, args.f0_err, args.f1, args.f1_err)
    payload = {"tc2": tc2, "tc2_err": sigma, "single_pass_loss": 1 - tc2}
    if args.mc:
        mean, sd = cav.taper_transmission_mc(args.f0, args.f0_err, args.f1, args.f1_err, args.mc, args.seed)
        payload.update(tc2_mc_mean=mean, tc2_mc_err=sd)
    if args.t_res is not None:
        inf = cav.infer_mirror_parameters(
            args.f0, args.f1, args.t_res, background_transmission=args.background
        )
        payload["mirrors"] = {
            "r1r2": inf.r1r2, "t1sq_t2sq": inf.t1sq_t2sq, "loss": inf.loss,
            "r_amp": list(inf.r_amp), "t_sq": list(inf.t_sq),
        }
        if args.save_model:
            sections = [cav.PathSection("cavity", cav.path_length_from_fsr(args.fsr), 1.0)]
            model = cav.model_from_inference(inf, sections, background_transmission=args.background)
            io.save_model(args.save_model, model)
    sys.stderr.write(f"tc^2 = {tc2:.6f} +/- {sigma:.6f}\n")
    _emit(args, payload, prov)


def _baseline_report(args) -> cqed.CqedReport:
    nu0 = C0 / args.wavelength
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RootAmbiguityWarning)
        mode = solve_he11(FiberGeometry.silica(args.diameter, args.wavelength))
    gamma = 2 * np.pi * args.gamma_over_2pi
    if args.v_tilde is not None:
        v_eff = args.v_tilde * args.wavelength**3
        return cqed.cqed_report(
            args.finesse, args.fsr, nu0, mode.beta, v_eff, gamma,
            dipole_factor=args.dipole_factor, dominance_factor=args.dominance,
        )
    secs = cqed.default_sections(
        args.diameter, args.wavelength, args.waist_length, cav.path_length_from_fsr(args.fsr)
    )
    inp = cqed.CqedInputs(args.finesse, args.fsr, nu0, mode, secs, gamma)
    return cqed.report_from_inputs(inp, args.dipole_factor, args.dominance)


def cmd_cqed(args, prov):
    rep = _baseline_report(args)
    _emit(args, rep.as_dict(), prov)


def cmd_design(args, prov):
    rep = _baseline_report(args)
    if args.log:
        lengths = np.geomspace(args.l_min, args.l_max, args.n)
    else:
        lengths = np.linspace(args.l_min, args.l_max, args.n)
    rows = cqed.design_scan(rep, lengths, args.target)
    cols = list(cqed.DESIGN_COLUMNS) + (["meets_target"] if args.target else [])
    if (args.format or "csv") == "csv":
        text = io.rows_to_csv(rows, cols, {"provenance": prov})
        if args.output:
            io.atomic_write(args.output, text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, {"rows": rows, "baseline": rep.as_dict()}, prov)


def _common(p):
    p.add_argument("--output", "-o", help="output file (stdout if omitted, where allowed)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--verbose", "-v", action="store_true")


def _cavity_flags(p):
    p.add_argument("--model", help="cavity model JSON (overrides the flags below)")
    p.add_argument("--finesse", type=float, default=85.56)
    p.add_argument("--fsr", type=float, default=1.48084e9)
    p.add_argument("--tc2", type=float, default=1.0)
    p.add_argument("--mirror-loss", type=float, default=0.0)
    p.add_argument("--splitting", type=float, default=0.0, help="birefringent splitting [Hz]")
    p.add_argument("--background", type=float, default=1.0)
    p.add_argument("--resonance", type=float, default=CS_D2_FREQUENCY, help="a mode-a resonance [Hz]")


def _cqed_flags(p):
    p.add_argument("--finesse", type=float, default=85.56)
    p.add_argument("--fsr", type=float, default=1.48084e9)
    p.add_argument("--wavelength", type=float, default=852.53e-9)
    p.add_argument("--diameter", type=float, default=500e-9)
    p.add_argument("--waist-length", type=float, default=5e-3)
    p.add_argument("--gamma-over-2pi", type=float, default=CS_D2_GAMMA_OVER_2PI)
    p.add_argument("--v-tilde", type=float, default=None, help="mode volume in lambda^3 (else computed)")
    p.add_argument("--dipole-factor", type=float, default=1.0)
    p.add_argument("--dominance", type=float, default=2.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nanofiber-fp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mode", help="solve the HE11 mode of a nanofiber")
    _common(p)
    p.add_argument("--diameter", type=float, required=True)
    p.add_argument("--wavelength", type=float, required=True)
    p.add_argument("--core-index", type=float, default=None)
    p.add_argument("--clad-index", type=float, default=1.0)
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("synth", help="synthesize a spectrum")
    _common(p)
    _cavity_flags(p)
    p.add_argument("--nu-start", type=float, required=True)
    p.add_argument("--nu-stop", type=float, required=True)
    p.add_argument("--points", type=int, default=4000)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--polarization", choices=("a", "b", "mixed"), default="a")
    p.add_argument("--angle", type=float, default=45.0, help="mixing angle [deg]")
    p.add_argument("--raw", action="store_true", help="raw scan with etalon/reference channels")
    p.add_argument("--etalon-fsr", type=float, default=300e6)
    p.add_argument("--distortion", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("calibrate", help="calibrate a raw scan axis")
    _common(p)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--etalon-fsr", type=float, required=True)
    p.add_argument("--reference-line", type=float, default=CS_D2_FREQUENCY)
    p.add_argument("--reference-position", type=float, default=None)
    p.add_argument("--direction", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("fit", help="Airy fit of a calibrated spectrum")
    _common(p)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--channel", default="transmission")
    p.add_argument("--center", type=float, default=None)
    p.add_argument("--span", type=float, default=None)
    p.add_argument("--fixed-fsr", type=float, default=None)
    p.add_argument("--per-fsr", action="store_true", help="finesse versus detuning")
    p.add_argument("--prominence", type=float, default=0.02)
    p.add_argument("--unit", choices=("Hz", "nm"), default="Hz")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("loss", help="taper transmission from two finesses")
    _common(p)
    p.add_argument("--f0", type=float, required=True)
    p.add_argument("--f0-err", type=float, default=0.0)
    p.add_argument("--f1", type=float, required=True)
    p.add_argument("--f1-err", type=float, default=0.0)
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo draws for the error oracle")
    p.add_argument("--t-res", type=float, default=None, help="on-resonance transmission")
    p.add_argument("--background", type=float, default=1.0)
    p.add_argument("--fsr", type=float, default=1.48084e9)
    p.add_argument("--save-model", default=None)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("cqed", help="cavity-QED figures of merit")
    _common(p)
    _cqed_flags(p)
    p.set_defaults(func=cmd_cqed)

    p = sub.add_parser("design", help="scan figures of merit over cavity length")
    _common(p)
    _cqed_flags(p)
    p.add_argument("--l-min", type=float, default=0.01)
    p.add_argument("--l-max", type=float, default=1.0)
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--log", action="store_true")
    p.add_argument("--target", choices=cqed.REGIMES, default=None)
    p.set_defaults(func=cmd_design)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    prov = _provenance(args, argv)
    sys.stderr.write("provenance: " + json.dumps(prov, sort_keys=True) + "\n")
    try:
        with warnings.catch_warnings():
            if not args.verbose:
                warnings.simplefilter("ignore")
            args.func(args, prov)
    except (DataFormatError, DomainError, IncompleteModelError, InsufficientCalibrationError,
            ScanDirectionError, FileNotFoundError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except (NoGuidedModeError, AmbiguousRootError, FitFailureError, FloatingPointError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
