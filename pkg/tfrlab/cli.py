"""Command-line front end: ``python -m tfrlab <command> [options]``.

Options come from defaults, then an optional JSON ``--config`` file, then
flags; later sources win. Every run prints one JSON summary line on stdout
and exits 0 (ok), 2 (validation error) or 3 (numerical failure).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import bargmann, core, diagnostics, formats, gabor, sampling, tfr, zak
from .config import EXIT_NUMERICAL, EXIT_OK, resolve_threads
from .errors import TfrlabError, ValidationError, require
from .export import scan_to_csv, write_scan_xlsx
from .selftest import run_selftest
from .windows import window_from_descriptor

logger = logging.getLogger("tfrlab")


# ---------------- Job configuration ----------------

COMMON_KEYS = ("window", "signal", "L", "dt", "input", "output")


def _descriptor(value):
    if isinstance(value, str) and value.strip().startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise ValidationError("cli.bad_window", f"window descriptor is not valid JSON: {value!r}") from exc
    return value


def _float_list(value):
    if value is None:
        return None
    items = value.split(",") if isinstance(value, str) else list(value)
    try:
        return [float(v) for v in items if str(v).strip() != ""]
    except ValueError as exc:
        raise ValidationError("cli.bad_option", f"expected a comma-separated list of numbers, got {value!r}") from exc


def _int_list(value):
    values = _float_list(value)
    if values is None:
        return None
    require(all(v == int(v) for v in values), "cli.bad_option", f"expected integers, got {value!r}")
    return [int(v) for v in values]


@dataclass(frozen=True)
class JobConfig:
    command: str
    window: object = "gaussian"
    signal: object = None
    L: int = 64
    dt: float | None = None
    inputs: tuple[str, ...] = ()
    output: str | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def build(cls, command: str, file_cfg: dict, flags: dict) -> JobConfig:
        opts = COMMANDS[command][1]
        allowed = set(COMMON_KEYS) | {name for name, *_ in opts} | {"command"}
        unknown = sorted(set(file_cfg) - allowed)
        require(not unknown, "cli.unknown_key", f"unknown config keys for {command!r}: {unknown}")
        merged = {name: default for name, _, default, _ in opts}
        merged.update({k: v for k, v in file_cfg.items() if k != "command"})
        merged.update({k: v for k, v in flags.items() if v is not None})
        converters = {name: conv for name, conv, _, _ in opts}
        options = {}
        for name in converters:
            value = merged.get(name)
            try:
                options[name] = None if value is None else converters[name](value)
            except (TypeError, ValueError) as exc:
                raise ValidationError("cli.bad_option", f"bad value for {name!r}: {value!r}") from exc
        inputs = merged.get("input") or ()
        inputs = (inputs,) if isinstance(inputs, str) else tuple(inputs)
        L = merged.get("L", 64)
        require(isinstance(L, (int, float)) and int(L) == L and int(L) >= 2, "cli.bad_option",
                f"L must be an integer >= 2, got {L!r}")
        dt = merged.get("dt")
        return cls(command, _descriptor(merged.get("window", "gaussian")), _descriptor(merged.get("signal")),
                   int(L), None if dt is None else float(dt), inputs, merged.get("output"), options)

    @property
    def grid(self) -> core.TimeGrid:
        return core.TimeGrid.centered(self.L, self.dt)


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ValidationError("cli.missing_config", f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError("cli.bad_config", f"config file {path} is not valid JSON: {exc.msg}") from exc
    require(isinstance(cfg, dict), "cli.bad_config", f"config file {path} must hold a JSON object")
    return cfg


# ---------------- Shared plumbing ----------------

def _signal(job: JobConfig) -> core.FiniteSignal:
    """First input file, else the ``signal`` descriptor sampled on the job grid."""
    if job.inputs:
        return formats.read_signal(job.inputs[0])
    if job.signal is not None:
        return core.sample(job.signal, job.grid)
    raise ValidationError("cli.missing_input", f"{job.command} needs --input or --signal")


def _window_on(job: JobConfig, f: core.FiniteSignal) -> core.FiniteSignal:
    """Second input file, else the ``window`` descriptor sampled on the grid of f."""
    if len(job.inputs) > 1:
        g = formats.read_signal(job.inputs[1])
        core.same_grid(f, g)
        return g
    return core.sample(job.window, f.grid)


def _write(job: JobConfig, writer, obj) -> None:
    if job.output:
        writer(obj, job.output)
        logger.info("wrote %s", job.output)


def _tf_metrics(V: tfr.TFMatrix) -> dict:
    mag = np.abs(V.values)
    i, j = np.unravel_index(int(np.argmax(mag)), mag.shape)
    return {"shape": list(V.shape), "max_abs": float(mag[i, j]),
            "argmax": {"x": float(V.x_grid[i]), "omega": float(V.omega_grid[j])}}


def _system(job: JobConfig) -> gabor.GaborSystem:
    g = _signal(job) if job.inputs else core.sample(job.window, job.grid)
    a, b = job.options.get("a"), job.options.get("b")
    require(a is not None and b is not None, "cli.missing_option", f"{job.command} needs --a and --b")
    return gabor.GaborSystem(g, a, b)


# ---------------- Commands ----------------

def cmd_stft(job, threads):
    """Short-time Fourier transform of a signal against a window."""
    f = _signal(job)
    V = tfr.stft(f, _window_on(job, f), job.options["hop"])
    _write(job, formats.write_tf_matrix, V)
    return _tf_metrics(V)


def cmd_spectrogram(job, threads):
    """Squared STFT modulus with a unit-norm window."""
    f = _signal(job)
    V = tfr.spectrogram(f, _window_on(job, f).normalized())
    _write(job, formats.write_tf_matrix, V)
    return _tf_metrics(V)


def cmd_ambiguity(job, threads):
    """Ambiguity function of a signal or a signal pair."""
    f = _signal(job)
    A = tfr.ambiguity(f, _window_on(job, f) if len(job.inputs) > 1 or job.options["cross"] else f)
    _write(job, formats.write_tf_matrix, A)
    return _tf_metrics(A)


def cmd_wigner(job, threads):
    """Wigner distribution on the half-step grid."""
    f = _signal(job)
    W = tfr.wigner(f, _window_on(job, f) if len(job.inputs) > 1 or job.options["cross"] else f)
    _write(job, formats.write_tf_matrix, W)
    metrics = _tf_metrics(W)
    metrics["min_real"] = float(W.values.real.min())
    return metrics


def cmd_rihaczek(job, threads):
    """Rihaczek distribution of a signal or a signal pair."""
    f = _signal(job)
    R = tfr.rihaczek(f, _window_on(job, f) if len(job.inputs) > 1 or job.options["cross"] else f)
    _write(job, formats.write_tf_matrix, R)
    return _tf_metrics(R)


def cmd_zak(job, threads):
    """Finite Zak transform and its quasi-periodicity check."""
    f = _signal(job)
    N = job.options["N"]
    if N is None:
        N = math.isqrt(f.length)
        require(N * N == f.length, "cli.missing_option", f"zak needs --N when L = {f.length} is not a square")
    Z = zak.zak_finite(f, N)
    _write(job, formats.write_zak, Z)
    mag = np.abs(Z.values) ** 2
    return {"N": Z.N, "M": Z.M, "min_abs_sq": float(mag.min()), "max_abs_sq": float(mag.max()),
            "cell_mass": Z.cell_mass, "norm_sq": f.norm ** 2,
            "quasiperiodicity_residual": zak.quasiperiodicity_residual(Z)}


def cmd_frame_bounds(job, threads):
    """Optimal frame bounds of a separable Gabor system."""
    G = _system(job)
    method = job.options["method"]
    report = gabor.frame_bounds(G, method)
    return {"a": G.a, "b": G.b, "density": G.density, **report.to_record()}


def cmd_dual_window(job, threads):
    """Canonical dual or tight window with its Wexler-Raz residual."""
    G = _system(job)
    h = gabor.tight_window(G) if job.options["tight"] else gabor.canonical_dual(G)
    _write(job, formats.write_signal, h)
    gtilde = gabor.canonical_dual(G) if job.options["tight"] else h
    return {"a": G.a, "b": G.b, "kind": "tight" if job.options["tight"] else "canonical_dual",
            "norm": h.norm, "wexler_raz_residual": gabor.wexler_raz_residual(G.window, gtilde, G)}


def cmd_frame_scan(job, threads):
    """Frame bounds over a grid of lattice steps."""
    g = _signal(job) if job.inputs else core.sample(job.window, job.grid)
    a_list, b_list = job.options["a_list"], job.options["b_list"]
    pairs = gabor.scan_pairs(a_list or gabor.divisors(g.length), b_list or gabor.divisors(g.length))
    table = gabor.frame_set_scan(g, pairs, method=job.options["method"], threads=threads)
    _write(job, scan_to_csv, table)
    if job.options["xlsx"]:
        write_scan_xlsx(table, job.options["xlsx"])
    frames = table["condition"].map(math.isfinite)
    return {"lattices": len(table), "frames": int(frames.sum()),
            "nested_violations": len(gabor.nested_violations(table))}


def cmd_wexler_raz(job, threads):
    """Wexler-Raz biorthogonality residual of a dual window, the canonical one by default."""
    G = _system(job)
    gtilde = formats.read_signal(job.inputs[1]) if len(job.inputs) > 1 else gabor.canonical_dual(G)
    return {"a": G.a, "b": G.b, "residual": gabor.wexler_raz_residual(G.window, gtilde, G)}


def cmd_figa(job, threads):
    """Both sides of the fundamental identity of Gabor analysis for random signals."""
    G = _system(job)
    rng = np.random.default_rng(job.options["seed"])
    f, h = (core.random_signal(G.grid, rng) for _ in range(2))
    gtilde = core.random_signal(G.grid, rng)
    lhs, rhs = gabor.figa_check(f, h, G.window, gtilde, G)
    return {"lhs": lhs, "rhs": rhs, "difference": abs(lhs - rhs)}


def cmd_sample_reconstruct(job, threads):
    """Reconstruct a signal from its samples with a truncated series."""
    exact = None
    if job.inputs:
        s = formats.read_sample_set(job.inputs[0])
    elif job.signal is not None:
        w = window_from_descriptor(job.signal)
        s = sampling.SampleSet.from_function(w, job.options["T"], job.options["K"], job.options["bandwidth"])
        exact = w
    else:
        raise ValidationError("cli.missing_input", "sample-reconstruct needs --input or --signal")
    ts = job.options["t"] or list(np.linspace(-5.0, 5.0, 101))
    method, B = job.options["method"], job.options["bandwidth"]
    if method == "sinc":
        results = [sampling.wkns_reconstruct(s, t, B) for t in ts]
    elif method == "bandpass":
        results = [sampling.bandpass_reconstruct(s, job.options["carrier"], t, B) for t in ts]
    elif method == "s0":
        results = [sampling.s0_window_reconstruct(s, None, t, B) for t in ts]
    else:
        raise ValidationError("cli.bad_option", f"unknown reconstruction method {method!r}; known: sinc, bandpass, s0")
    values = np.array([r.value for r in results])
    table = pd.DataFrame({"t": ts, "re": values.real, "im": values.imag, "tail_bound": [r.tail_bound for r in results]})
    _write(job, lambda df, p: df.to_csv(p, index=False, float_format="%.17g"), table)
    metrics = {"points": len(ts), "max_tail_bound": float(table["tail_bound"].max())}
    if exact is not None:
        metrics["max_error"] = float(np.max(np.abs(values - exact(np.asarray(ts)))))
    return metrics


def cmd_poisson_check(job, threads):
    """Both sides of the Poisson summation formula for a window."""
    check = sampling.poisson_check(job.window, job.options["t"], job.options["K"], job.options["alpha"])
    return check._asdict()


def cmd_bargmann(job, threads):
    """Bargmann transform sampled on a Fock disc, with isometry and growth checks."""
    grid = bargmann.FockGrid(job.options["radius"], job.options["step"])
    if job.inputs:
        f = formats.read_signal(job.inputs[0])
        norm = f.norm
    else:
        f = window_from_descriptor(job.signal if job.signal is not None else job.window)
        norm = f.norm()
    F = bargmann.fock_samples(f, grid)
    _write(job, formats.write_fock, F)
    fock = bargmann.fock_norm(F)
    return {"points": int(grid.inside.sum()), "fock_norm": fock, "signal_norm": norm,
            "isometry_error": abs(fock - norm), "growth_excess": F.growth_excess(norm)}


def cmd_hermite(job, threads):
    """Sampled Hermite function and its Fourier-eigenvector residual."""
    n = job.options["n"]
    h = core.sample(bargmann.hermite(n), job.grid)
    _write(job, formats.write_signal, h)
    eigen = np.max(np.abs(core.fourier(h).values - (-1j) ** n * h.values))
    return {"n": n, "norm": h.norm, "fourier_eigen_residual": float(eigen)}


def cmd_diagnostics(job, threads):
    """Uncertainty-principle diagnostics for a signal."""
    f = _signal(job) if (job.inputs or job.signal is not None) else core.sample(job.window, job.grid)
    g = _window_on(job, f).normalized()
    fn = f.normalized()
    prod, bound = diagnostics.hpw_product(f, job.options["x_center"], job.options["omega_center"])
    c = job.options["concentration"]
    T = diagnostics.interval_set(f.grid, -c, c)
    W = diagnostics.interval_set(f.grid.frequency_grid(), -c, c)
    eps_t, eps_w, slack = diagnostics.donoho_stark_check(f, T, W)
    V = tfr.stft(fn, g)
    mass, area = diagnostics.weak_up_stft(fn, g, diagnostics.disc_region(V, c))
    lieb = {}
    for p in job.options["p"]:
        lhs, rhs = diagnostics.lieb_check(fn, g, p)
        lieb[f"p={p:g}"] = {"lhs": lhs, "rhs": rhs, "holds": diagnostics.lieb_direction_holds(lhs, rhs, p)}
    hudson, where = bargmann.hudson_probe(f)
    metrics = {"hpw": {"product": prod, "bound": bound}, "donoho_stark": {"eps_T": eps_t, "eps_Omega": eps_w, "slack": slack},
               "weak_up": {"mass": mass, "area": area}, "lieb": lieb, "wigner_min": {"value": hudson, "at": where}}
    if job.options["block"]:
        metrics["amalgam_norm"] = diagnostics.amalgam_norm(f, job.options["block"])
    return metrics


_bool = lambda v: v if isinstance(v, bool) else str(v).strip().lower() in ("1", "true", "yes", "on")
_GABOR = [("a", int, None, "time step in samples"), ("b", int, None, "frequency step in bins")]
_CROSS = [("cross", _bool, False, "use the window instead of the signal as second argument")]

# name -> (handler, [(option, converter, default, help)], selftest module)
COMMANDS = {
    "stft": (cmd_stft, [("hop", int, 1, "time hop in samples")], "tfr"),
    "spectrogram": (cmd_spectrogram, [], "tfr"),
    "ambiguity": (cmd_ambiguity, _CROSS, "tfr"),
    "wigner": (cmd_wigner, _CROSS, "tfr"),
    "rihaczek": (cmd_rihaczek, _CROSS, "tfr"),
    "zak": (cmd_zak, [("N", int, None, "factor N of L; default sqrt(L)")], "zak"),
    "frame-bounds": (cmd_frame_bounds, _GABOR + [("method", str, "auto", "dense_eig, iterative, zak or auto")], "gabor"),
    "dual-window": (cmd_dual_window, _GABOR + [("tight", _bool, False, "canonical tight window instead of the dual")], "gabor"),
    "frame-scan": (cmd_frame_scan, [("a_list", _int_list, None, "comma-separated time steps"),
                                    ("b_list", _int_list, None, "comma-separated frequency steps"),
                                    ("method", str, "dense_eig", "dense_eig, iterative or zak"),
                                    ("xlsx", str, None, "also write the table as .xlsx")], "gabor"),
    "wexler-raz": (cmd_wexler_raz, _GABOR, "gabor"),
    "figa": (cmd_figa, _GABOR + [("seed", int, 0, "random seed")], "gabor"),
    "sample-reconstruct": (cmd_sample_reconstruct, [("t", _float_list, None, "comma-separated evaluation times"),
                                                    ("T", float, 0.5, "sampling period for --signal"),
                                                    ("K", int, 200, "samples k = -K..K for --signal"),
                                                    ("bandwidth", float, None, "declared bandwidth B"),
                                                    ("method", str, "sinc", "sinc, bandpass or s0"),
                                                    ("carrier", float, 0.0, "bandpass carrier frequency")], "sampling"),
    "poisson-check": (cmd_poisson_check, [("t", float, 0.0, "evaluation point"), ("K", int, 8, "truncation"),
                                          ("alpha", float, 1.0, "period")], "sampling"),
    "bargmann": (cmd_bargmann, [("radius", float, 4.0, "Fock disc radius"),
                                ("step", float, 0.05, "Fock grid step")], "bargmann"),
    "hermite": (cmd_hermite, [("n", int, 0, "order")], "bargmann"),
    "diagnostics": (cmd_diagnostics, [("x_center", float, 0.0, "HPW time center a"),
                                      ("omega_center", float, 0.0, "HPW frequency center b"),
                                      ("concentration", float, 2.0, "half width of the T, Omega sets and the STFT disc"),
                                      ("p", _float_list, [1.0, 4.0], "Lieb exponents"),
                                      ("block", int, None, "amalgam block length")], "diagnostics"),
}


# ---------------- Parser and entry point ----------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfrlab", description="Time-frequency analysis toolkit.")
    parser.add_argument("--config", help="JSON job file; flags override its values")
    parser.add_argument("--threads", help="worker cap (default: $TFRLAB_THREADS, else CPU count)")
    parser.add_argument("--selftest", action="store_true", help="run the oracle checks for the command's module (all if no command)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command")
    for name, (handler, opts, _) in COMMANDS.items():
        p = sub.add_parser(name, help=(handler.__doc__ or name).strip().splitlines()[0], allow_abbrev=False)
        p.add_argument("--window", help='window kind or JSON descriptor, e.g. \'{"kind": "gaussian", "params": {"scale": 2}}\'')
        p.add_argument("--signal", help="analysed signal as a window descriptor (instead of --input)")
        p.add_argument("--L", type=int, help="grid length")
        p.add_argument("--dt", type=float, help="grid step (default 1/sqrt(L))")
        p.add_argument("--input", nargs="+", help="signal file(s): binary or CSV t,re,im")
        p.add_argument("--output", help="output file")
        p.add_argument("--selftest", action="store_true", default=argparse.SUPPRESS, help="run this module's oracle checks instead")
        for opt, conv, default, text in opts:
            flag = "--" + opt.replace("_", "-")
            if conv is _bool:
                p.add_argument(flag, dest=opt, action="store_const", const=True, help=text)
            else:
                p.add_argument(flag, dest=opt, help=f"{text} (default {default})")
    return parser


def _summary(command, status, **extra) -> None:
    print(formats.dumps({"command": command, "status": status, **extra}))


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    command = args.command
    try:
        file_cfg = _load_config(args.config)
        command = command or file_cfg.get("command")
        threads = resolve_threads(args.threads)
        if args.selftest:
            if command is not None and command not in COMMANDS:
                raise ValidationError("cli.unknown_command", f"unknown command {command!r}; known: {sorted(COMMANDS)}")
            report = run_selftest(None if command is None else [COMMANDS[command][2]])
            failed = sum(r["failed"] for r in report.values())
            _summary("selftest", "ok" if not failed else "failed", key_metrics=report)
            return EXIT_OK if not failed else EXIT_NUMERICAL
        if command not in COMMANDS:
            raise ValidationError("cli.unknown_command", f"unknown or missing command {command!r}; known: {sorted(COMMANDS)}")
        flags = {k: v for k, v in vars(args).items() if k not in ("config", "threads", "selftest", "verbose", "command")}
        job = JobConfig.build(command, file_cfg, flags)
        metrics = COMMANDS[command][0](job, threads)
    except TfrlabError as exc:
        logger.error("%s: %s", exc.code, exc.message)
        _summary(command, "error", error=exc.to_record())
        return exc.exit_code
    _summary(command, "ok", key_metrics=metrics)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
