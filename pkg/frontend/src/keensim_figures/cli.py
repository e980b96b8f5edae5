"""Command line: ``keensim-render <layout> <in.csv> [jumps.csv] <out.png>``."""

from __future__ import annotations

import argparse
import sys

from .io import RenderInputError
from .render import PanelSpec, render


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="keensim-render",
        description="Render simulator CSV outputs as figures.")
    parser.add_argument("layout", choices=("trajectory", "sweep", "heatmap"))
    parser.add_argument("paths", nargs="+",
                        metavar="in.csv [jumps.csv] out.png")
    parser.add_argument("--overlay", action="store_true",
                        help="draw analytic reference lines (trajectory only)")
    args = parser.parse_args(argv)

    if len(args.paths) == 2:
        csv_path, jumps_path, out_path = args.paths[0], None, args.paths[1]
    elif len(args.paths) == 3 and args.layout == "trajectory":
        csv_path, jumps_path, out_path = args.paths
    else:
        parser.error("expected <in.csv> [jumps.csv] <out.png>")

    spec = PanelSpec(layout=args.layout, csv_path=csv_path,
                     out_path=out_path, jumps_path=jumps_path,
                     overlay=args.overlay)
    try:
        render(spec)
    except RenderInputError as exc:
        print(f"keensim-render: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"keensim-render: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
