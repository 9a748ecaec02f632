# Copyright 2026 The noisytb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reader and schema validator for noisytb summary CSV files."""

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"
SUMMARY_HEADER = [
    "t", "mean_x2", "mean_x_sq", "mean_var", "mean_pn",
    "stderr_mean_x2", "stderr_mean_x_sq", "stderr_mean_var", "stderr_mean_pn",
]


class SchemaError(Exception):
    pass


@dataclass
class Summary:
    path: str
    meta: dict
    columns: dict
    fits: list = field(default_factory=list)

    @property
    def gamma(self):
        return float(self.meta["model.gamma"])

    @property
    def unravelling(self):
        return self.meta.get("run.unravelling", "?")

    def fit_value(self, kind):
        """Value of the last `# fit kind=<kind>` line, or None."""
        found = None
        for f in self.fits:
            if f.get("kind") == kind:
                found = float(f["value"])
        return found


def _parse_fit(body, where):
    out = {}
    for token in body.split():
        if "=" not in token:
            raise SchemaError(f"{where}: malformed fit token '{token}'")
        k, v = token.split("=", 1)
        out[k] = v
    if "kind" not in out or "value" not in out:
        raise SchemaError(f"{where}: fit line lacks kind or value")
    return out


def read_summary(path):
    """Parses and validates one summary CSV. Raises SchemaError."""
    if not os.path.isfile(path):
        raise SchemaError(f"{path}: no such file")
    meta, fits, rows = {}, [], []
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            where = f"{path}:{no}"
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("fit "):
                    fits.append(_parse_fit(body[4:], where))
                elif " = " in body:
                    k, v = body.split(" = ", 1)
                    meta[k.strip()] = v.strip()
                continue
            if not header_seen:
                if line.split(",") != SUMMARY_HEADER:
                    raise SchemaError(f"{where}: unexpected header '{line}'")
                header_seen = True
                continue
            fields = line.split(",")
            if len(fields) != len(SUMMARY_HEADER):
                raise SchemaError(
                    f"{where}: expected {len(SUMMARY_HEADER)} columns, found {len(fields)}")
            try:
                values = [float(x) for x in fields]
            except ValueError:
                raise SchemaError(f"{where}: non-numeric field in '{line}'") from None
            if not all(math.isfinite(x) for x in values):
                raise SchemaError(f"{where}: non-finite value")
            rows.append(values)
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"{path}: missing or unsupported schema_version")
    if not header_seen:
        raise SchemaError(f"{path}: missing header row")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    if "model.gamma" not in meta:
        raise SchemaError(f"{path}: missing model.gamma in preamble")
    times = [r[0] for r in rows]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise SchemaError(f"{path}: times are not strictly increasing")
    columns = {name: [r[i] for r in rows] for i, name in enumerate(SUMMARY_HEADER)}
    return Summary(path=path, meta=meta, columns=columns, fits=fits)


def read_all(paths):
    if not paths:
        raise SchemaError("no input CSV files")
    return [read_summary(p) for p in paths]


def figure_main(description, render, min_inputs=1):
    """Shared command line: `figN.py CSV... -o OUT`. Exit 2 on schema errors."""
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("csv", nargs="*", help="summary CSV files")
    ap.add_argument("-o", "--out", required=True, help="output image (png, pdf, svg)")
    args = ap.parse_args()
    try:
        data = read_all(args.csv)
        if len(data) < min_inputs:
            raise SchemaError(f"need at least {min_inputs} CSV files")
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        plt.rcParams.update({"svg.hashsalt": "noisytb", "font.size": 10})
        fig = render(plt, data)
        meta = {}
        if args.out.endswith(".png"):
            meta = {"Software": None}
        elif args.out.endswith(".svg"):
            meta = {"Date": None}
        elif args.out.endswith(".pdf"):
            meta = {"CreationDate": None, "Producer": None, "Creator": None}
        fig.savefig(args.out, dpi=120, metadata=meta)
        plt.close(fig)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    return 0
