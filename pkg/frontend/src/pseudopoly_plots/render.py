"""Render sweep CSVs (schema `pseudopoly-csv v1`) into word-error-rate
comparison figures: one curve per decoder, log-scale WER against the channel
parameter, Wilson intervals as error bars.

Values are plotted exactly as they appear in the CSV; nothing is resampled
or smoothed. Points with zero recorded errors are drawn at their Wilson
upper bound with a downward marker, so high-quality operating points remain
visible on the log axis.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

CSV_VERSION = "pseudopoly-csv v1"

DEFAULT_STYLES = ("o-", "s-", "^-", "d-", "v-", "x-")


class SchemaError(ValueError):
    """The input file is not a v1 sweep CSV."""


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple[str, ...]
    out_path: str
    decoder_styles: Optional[dict[str, str]] = None  # decoder label -> fmt
    x_label: str = "Eb/N0 (dB)"
    y_label: str = "word error rate"
    title: str = ""
    log_y: bool = True


@dataclass
class SeriesData:
    """One plotted curve, exactly as read from the CSV."""

    decoder: str
    param: list[float] = field(default_factory=list)
    wer: list[float] = field(default_factory=list)
    wer_lo: list[float] = field(default_factory=list)
    wer_hi: list[float] = field(default_factory=list)
    zero_error: list[bool] = field(default_factory=list)


def load_csv(path: str) -> dict[str, SeriesData]:
    """Parse a v1 sweep CSV into per-decoder series (insertion order)."""
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != f"# {CSV_VERSION}":
        raise SchemaError(f"{path}: missing '# {CSV_VERSION}' header line")
    reader = csv.DictReader(text[1:])
    required = {"decoder", "param_db", "wer", "wer_lo", "wer_hi", "word_errors"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        missing = required - set(reader.fieldnames or ())
        raise SchemaError(f"{path}: missing columns {sorted(missing)}")
    series: dict[str, SeriesData] = {}
    for row in reader:
        dec = row["decoder"]
        s = series.setdefault(dec, SeriesData(dec))
        s.param.append(float(row["param_db"]))
        s.wer.append(float(row["wer"]))
        s.wer_lo.append(float(row["wer_lo"]))
        s.wer_hi.append(float(row["wer_hi"]))
        s.zero_error.append(int(row["word_errors"]) == 0)
    if not series:
        raise SchemaError(f"{path}: no data rows")
    return series


def render(spec: PlotSpec) -> dict[str, SeriesData]:
    """Render the figure and return the exact plotted series per decoder."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    merged: dict[str, SeriesData] = {}
    for path in spec.csv_paths:
        for dec, s in load_csv(path).items():
            if dec in merged:
                merged[dec].param.extend(s.param)
                merged[dec].wer.extend(s.wer)
                merged[dec].wer_lo.extend(s.wer_lo)
                merged[dec].wer_hi.extend(s.wer_hi)
                merged[dec].zero_error.extend(s.zero_error)
            else:
                merged[dec] = s
    if spec.decoder_styles:
        unknown = set(spec.decoder_styles) - set(merged)
        if unknown:
            raise SchemaError(f"styles reference decoders not in the CSV: {sorted(unknown)}")

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for k, (dec, s) in enumerate(merged.items()):
        style = (
            spec.decoder_styles.get(dec, DEFAULT_STYLES[k % len(DEFAULT_STYLES)])
            if spec.decoder_styles
            else DEFAULT_STYLES[k % len(DEFAULT_STYLES)]
        )
        drawn = [(p, w, lo, hi) for p, w, lo, hi, z in
                 zip(s.param, s.wer, s.wer_lo, s.wer_hi, s.zero_error) if not z]
        if drawn:
            px, pw, plo, phi = (list(v) for v in zip(*drawn))
            yerr = [[w - lo for w, lo in zip(pw, plo)], [hi - w for w, hi in zip(pw, phi)]]
            ax.errorbar(px, pw, yerr=yerr, fmt=style, capsize=3, label=dec)
        zeros = [(p, hi) for p, hi, z in zip(s.param, s.wer_hi, s.zero_error) if z]
        if zeros:
            zx, zy = (list(v) for v in zip(*zeros))
            ax.plot(zx, zy, "v", markerfacecolor="none",
                    label=f"{dec} (0 errors, Wilson upper bound)" if not drawn else None,
                    color=ax.lines[-1].get_color() if drawn else None)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return merged


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="pseudopoly-plot")
    parser.add_argument("csv", nargs="+", help="sweep CSV file(s), schema v1")
    parser.add_argument("--out", default="wer.png")
    parser.add_argument("--title", default="")
    parser.add_argument("--linear-y", action="store_true")
    args = parser.parse_args(argv)
    spec = PlotSpec(
        csv_paths=tuple(args.csv),
        out_path=args.out,
        title=args.title,
        log_y=not args.linear_y,
    )
    try:
        series = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}: {len(series)} curves")
    return 0


if __name__ == "__main__":
    sys.exit(main())
