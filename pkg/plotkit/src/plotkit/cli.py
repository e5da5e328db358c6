"""CLI wrapper: lgrape-plot --csv sweep.csv --x T --out figure.svg"""

import argparse
import sys

from .render import FigureSpec, SchemaError, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lgrape-plot",
        description="Render scheme-comparison figures from lgrape sweep CSVs.",
    )
    parser.add_argument("--csv", action="append", required=True, help="sweep CSV (repeatable)")
    parser.add_argument("--x", required=True, help="column plotted on the x axis")
    parser.add_argument("--out", required=True, help="output image (.svg or .pdf)")
    parser.add_argument("--y", default="fq_over_t", help="column plotted on the y axis")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            csv_paths=tuple(args.csv),
            x_column=args.x,
            y_column=args.y,
            out_path=args.out,
            title=args.title,
        )
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
