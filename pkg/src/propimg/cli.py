"""Command-line surface: synth, encode, png, inspect, bench.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .core import EncoderConfig, compute_deviation, compute_local_range
from .encoders import encode_slope_dynamics, encode_spike_patterns, map_cymatic_params
from .errors import DataError, IndexOutOfRange, IoFailure, ToolkitError
from .ingestion import parse_manifest, stream_windows
from .pipeline import encode_dataset, run_benchmark
from .pitio import export_png, read_pit_header, read_pit_record, write_index
from .synthgait import (
    build_manifest_doc,
    default_gait_spec,
    generate_gait,
    write_gait_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_threads() -> int:
    env = os.environ.get("PI_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="propimg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic gait CSV + manifest")
    p.add_argument("--gait", choices=("trot", "crawl"), default="trot")
    p.add_argument("--duration", type=float, default=60.0, help="seconds")
    p.add_argument("--rate", type=float, default=100.0, help="sample rate in Hz")
    p.add_argument("--period", type=float, default=0.5, help="gait period in seconds")
    p.add_argument("--duty", type=float, default=None, help="stance fraction (gait default)")
    p.add_argument("--noise", type=float, default=0.01, help="noise std as fraction of range")
    p.add_argument("--grf-noise", type=float, default=0.05)
    p.add_argument("--friction", choices=("stable", "slippery"), default="stable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, default=10, help="window size written to the manifest")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--prefix", default=None, help="output file prefix (default gait_friction)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("encode", help="encode a dataset into PIT files")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=None, help="override manifest window")
    p.add_argument("--stride", type=int, default=None, help="override manifest stride")
    p.add_argument("--spike-alpha", type=float, default=3.0)
    p.add_argument("--signals", default=None, help="comma-separated signal kinds to encode")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--split", default="all", help="split name recorded in the index")

    p = sub.add_parser("png", help="export one PIT record as PNG")
    p.add_argument("--pit", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("inspect", help="dump intermediate features for one window")
    p.add_argument("--manifest", required=True)
    p.add_argument("--window-index", type=int, default=0, help="position in emission order")
    p.add_argument("--channel", required=True, help="CSV column name")
    p.add_argument("--spike-alpha", type=float, default=3.0)

    p = sub.add_parser("bench", help="measure encoder throughput")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    return parser


def cmd_synth(args) -> int:
    overrides = dict(
        duration=args.duration,
        sample_rate=args.rate,
        period=args.period,
        noise_sigma=args.noise,
        grf_noise_sigma=args.grf_noise,
        friction_mode=args.friction,
        seed=args.seed,
    )
    if args.duty is not None:
        overrides["duty_factor"] = args.duty
    spec = default_gait_spec(args.gait, **overrides)
    os.makedirs(args.out, exist_ok=True)
    prefix = args.prefix or f"{args.gait}_{args.friction}"
    csv_name = f"{prefix}.csv"
    csv_path = os.path.join(args.out, csv_name)
    manifest_path = os.path.join(args.out, f"{prefix}_manifest.json")

    cols = generate_gait(spec)
    rows = write_gait_csv(csv_path, cols)
    doc = build_manifest_doc(spec, csv_name, window=args.window, stride=args.stride)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps({"csv": csv_path, "manifest": manifest_path, "rows": rows}))
    return EXIT_OK


def cmd_encode(args) -> int:
    manifest = parse_manifest(args.manifest)
    if args.window is not None or args.stride is not None:
        manifest = replace(
            manifest,
            window_w=args.window if args.window is not None else manifest.window_w,
            stride=args.stride if args.stride is not None else manifest.stride,
        )
    selected = set(args.signals.split(",")) if args.signals else None
    if selected:
        known = {s.name for s in manifest.signals}
        unknown = selected - known
        if unknown:
            raise DataError(f"unknown signals {sorted(unknown)}; manifest has {sorted(known)}")
    cfg = EncoderConfig(window_w=manifest.window_w, spike_alpha=args.spike_alpha)
    threads = args.threads if args.threads is not None else _default_threads()

    out_dir = os.path.join(args.out, args.split)
    report, paths = encode_dataset(manifest, out_dir, cfg, selected, threads)

    files = []
    for (kind, scope), path in sorted(paths.items()):
        header = read_pit_header(path)
        files.append(
            {
                "path": os.path.relpath(path, args.out),
                "signal_kind": kind,
                "scope": scope,
                "height": header.height,
                "width": header.width,
                "channels": header.channels,
                "records": header.record_count,
            }
        )
    write_index(
        os.path.join(args.out, "index.json"),
        manifest.window_w,
        manifest.stride,
        args.split,
        files,
        os.path.abspath(args.manifest),
    )
    print(json.dumps({"report": report.as_dict(), "files": files}, indent=2))
    return EXIT_OK


def cmd_png(args) -> int:
    _, record = read_pit_record(args.pit, args.index)
    export_png(record.image, args.out)
    print(json.dumps({"png": args.out, "label": record.label}))
    return EXIT_OK


def cmd_inspect(args) -> int:
    manifest = parse_manifest(args.manifest)
    target = None
    for sig in manifest.signals:
        for ch in sig.channels:
            if ch.column == args.channel:
                target = (sig, ch)
    if target is None:
        raise DataError(f"channel {args.channel!r} is not bound by the manifest")
    sig, ch = target

    for i, ws in enumerate(stream_windows(manifest)):
        if i == args.window_index:
            break
    else:
        raise IndexOutOfRange(f"window index {args.window_index} past the end of the stream")

    group = next(g for g in ws.groups if g.signal_kind == sig.name and g.slot == ch.slot)
    axis_pos = sig.axes.index(ch.axis)
    window = group.windows[axis_pos]
    bounds = group.bounds[axis_pos]
    cfg = EncoderConfig(window_w=manifest.window_w, spike_alpha=args.spike_alpha)

    _, slope = encode_slope_dynamics(window, cfg)
    _, spikes = encode_spike_patterns(window, cfg)
    descriptor = []
    for win, b in zip(group.windows, group.bounds):
        dev = compute_deviation(compute_local_range(win, cfg), b)
        descriptor.extend((dev.delta_min, dev.delta_max))
    params = map_cymatic_params(descriptor)
    local = compute_local_range(window, cfg)
    dev = compute_deviation(local, bounds)

    out = {
        "channel": ch.column,
        "signal_kind": sig.name,
        "slot": ch.slot,
        "axis": ch.axis,
        "window_index": args.window_index,
        "trailing_row": ws.index,
        "contact_state": ws.contact_state,
        "window": [float(v) for v in window.values],
        "global_bounds": {"min": bounds.min, "max": bounds.max},
        "local_range": {"min": local.min, "max": local.max},
        "deviation": {"delta_min": dev.delta_min, "delta_max": dev.delta_max},
        "slope_features": {
            "slope_hat": slope.slope_hat,
            "jerk_hat": slope.jerk_hat,
            "peak_density": slope.peak_density,
            "ripple_freq": slope.ripple_freq,
            "center": list(slope.center),
            "sigma_g": slope.sigma_g,
        },
        "spike_stats": {
            "median_x": spikes.median_x,
            "mad_x": spikes.mad_x,
            "threshold": spikes.threshold,
            "median_delta": spikes.median_delta,
            "mad_delta": spikes.mad_delta,
            "gated_count": spikes.gated_count,
        },
        "cymatic_descriptor": descriptor,
        "cymatic_params": {
            "k_r": params.k_r,
            "k_t": params.k_t,
            "phi_r": params.phi_r,
            "phi_t": params.phi_t,
            "alpha_mod": params.alpha_mod,
            "blend": params.blend,
        },
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    report = run_benchmark(args.window, args.iters, threads, args.seed)
    print(json.dumps(report, indent=2))
    return EXIT_OK


_HANDLERS = {
    "synth": cmd_synth,
    "encode": cmd_encode,
    "png": cmd_png,
    "inspect": cmd_inspect,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except IoFailure as exc:
        print(f"propimg {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataError, ToolkitError) as exc:
        print(f"propimg {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"propimg {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
