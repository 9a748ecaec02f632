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


"""Variance and participation number against gamma t: state diffusion in
colour, wide-open runs in grey."""

import sys

from ntbcsv import figure_main


def render(plt, data):
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4.5))
    full = sorted((s for s in data if s.unravelling != "qsd-wide"), key=lambda s: s.gamma)
    wide = sorted((s for s in data if s.unravelling == "qsd-wide"), key=lambda s: s.gamma)
    for series, shade in ((full, None), (wide, "grey")):
        for i, s in enumerate(series):
            g = s.gamma
            t = [g * x for x in s.columns["t"]]
            keep = [k for k, x in enumerate(t) if x > 0]
            color = f"C{i}" if shade is None else str(0.2 + 0.5 * i / max(1, len(series)))
            name = "wide open" if shade else "state diffusion"
            for ax, col in ((left, "mean_var"), (right, "mean_pn")):
                ax.plot([t[k] for k in keep], [s.columns[col][k] for k in keep], "-",
                        color=color, label=f"{name}, gamma = {g:g}")
    for ax, label in ((left, "M[sigma^2]"), (right, "M[P]")):
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("gamma t")
        ax.set_ylabel(label)
    right.legend(fontsize=7)
    fig.tight_layout()
    return fig


if __name__ == "__main__":
    sys.exit(figure_main("State diffusion against the wide-open limit", render))
