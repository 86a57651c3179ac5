#!/usr/bin/env python3
"""Download the benchmark corpora into corpora/<suite>/.

Suites: canterbury, large, calgary (from corpus.canterbury.ac.nz).

Archive hashes live in data/corpora.lock.json. A suite with no recorded hash
is trusted on first download and its hash written back (commit the updated
lock file); after that a mismatch is a hard error.

If the official host is unreachable, --fallback-brotli fills
corpora/canterbury-partial/ with the four Canterbury text files shipped in
the Brotli 1.1.0 sdist from PyPI (hash pinned below). That is 4 of the 11
Canterbury files, so the full-corpus acceptance check still skips.
"""
import argparse
import hashlib
import io
import json
import pathlib
import shutil
import subprocess
import sys
import tarfile
import tempfile
import urllib.request

ROOT = pathlib.Path(__file__).resolve().parent.parent
LOCK = ROOT / "data" / "corpora.lock.json"

SUITES = {
    "canterbury": "https://corpus.canterbury.ac.nz/resources/cantrbry.tar.gz",
    "large": "https://corpus.canterbury.ac.nz/resources/large.tar.gz",
    "calgary": "https://corpus.canterbury.ac.nz/resources/calgary.tar.gz",
}

BROTLI_SDIST = "Brotli-1.1.0.tar.gz"
BROTLI_SHA256 = "81de08ac11bcb85841e440c13611c00b67d3bf82698314928d0b676362546724"
BROTLI_FILES = ["alice29.txt", "asyoulik.txt", "lcet10.txt", "plrabn12.txt"]


def sha256(data):
    return hashlib.sha256(data).hexdigest()


def load_lock():
    if LOCK.exists():
        return json.loads(LOCK.read_text())
    return {"schema_version": 1, "archives": {}}


def save_lock(lock):
    LOCK.write_text(json.dumps(lock, indent=2, sort_keys=True) + "\n")


def extract(data, dest, only=None):
    dest.mkdir(parents=True, exist_ok=True)
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:*") as tar:
        for m in tar.getmembers():
            name = pathlib.PurePosixPath(m.name).name
            if not m.isfile() or (only and name not in only):
                continue
            with tar.extractfile(m) as src, open(dest / name, "wb") as out:
                shutil.copyfileobj(src, out)


def fetch_suite(suite, out_dir, lock, timeout):
    url = SUITES[suite]
    print(f"{suite}: {url}", file=sys.stderr)
    with urllib.request.urlopen(url, timeout=timeout) as r:
        data = r.read()
    digest = sha256(data)
    known = lock["archives"].get(suite)
    if known is None:
        print(f"{suite}: no pinned hash, recording {digest}", file=sys.stderr)
        lock["archives"][suite] = {"url": url, "sha256": digest}
        save_lock(lock)
    elif known["sha256"] != digest:
        raise SystemExit(f"{suite}: sha256 mismatch, expected {known['sha256']}, got {digest}")
    extract(data, out_dir / suite)


def fetch_brotli(out_dir):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--no-binary", ":all:",
             "--timeout", "60", "-d", tmp, "Brotli==1.1.0"],
            check=True, stdout=sys.stderr)
        data = (pathlib.Path(tmp) / BROTLI_SDIST).read_bytes()
    if sha256(data) != BROTLI_SHA256:
        raise SystemExit(f"{BROTLI_SDIST}: sha256 mismatch")
    extract(data, out_dir / "canterbury-partial", only=set(BROTLI_FILES))
    print(f"canterbury-partial: {', '.join(BROTLI_FILES)}", file=sys.stderr)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("suites", nargs="*", help=f"subset of {', '.join(SUITES)} (default: all)")
    ap.add_argument("--out", type=pathlib.Path, default=ROOT / "corpora")
    ap.add_argument("--timeout", type=float, default=30.0)
    ap.add_argument("--fallback-brotli", action="store_true",
                    help="on download failure, fetch the partial Canterbury set from the Brotli sdist")
    args = ap.parse_args()

    unknown = set(args.suites) - set(SUITES)
    if unknown:
        ap.error(f"unknown suite(s): {', '.join(sorted(unknown))}")
    lock = load_lock()
    failed = []
    for suite in args.suites or list(SUITES):
        try:
            fetch_suite(suite, args.out, lock, args.timeout)
        except OSError as e:
            print(f"{suite}: download failed: {e}", file=sys.stderr)
            failed.append(suite)
    if failed and args.fallback_brotli:
        fetch_brotli(args.out)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
