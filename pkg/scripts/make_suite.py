"""Write a seeded corpus as instance files, ready for ``twovalue-nsw bench --suite``."""

import argparse
from pathlib import Path

from twovalue_nsw.corpus import exactness_corpus, heavy_only_corpus, rational_corpus
from twovalue_nsw.fileio import save_instance

CORPORA = {
    "exactness": exactness_corpus,
    "heavy-only": heavy_only_corpus,
    "rational": rational_corpus,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", choices=sorted(CORPORA))
    ap.add_argument("outdir")
    ap.add_argument("--count", type=int, default=None)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    make = CORPORA[args.corpus]
    insts = make() if args.count is None else make(args.count)
    width = len(str(len(insts)))
    for k, inst in enumerate(insts):
        save_instance(inst, out / f"{args.corpus}_{k:0{width}d}.json")
    print(f"wrote {len(insts)} instances to {out}")


if __name__ == "__main__":
    main()
