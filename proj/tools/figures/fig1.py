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


"""Mean squared position against time with the 4/gamma diffusion guides."""

import sys

from ntbcsv import figure_main


def render(plt, data):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    gammas = sorted({s.gamma for s in data})
    colors = {g: f"C{i}" for i, g in enumerate(gammas)}
    marker = {"wnp": "*", "qsd": "x"}
    for s in data:
        t, y = s.columns["t"], s.columns["mean_x2"]
        keep = [i for i, v in enumerate(t) if v > 0]
        label = f"{s.unravelling.upper()}, gamma = {s.gamma:g}"
        ax.plot([t[i] for i in keep], [y[i] for i in keep], marker.get(s.unravelling, "o"),
                ls="none", ms=4, color=colors[s.gamma], label=label)
    for g in gammas:
        ref = next(s for s in data if s.gamma == g)
        t = [v for v in ref.columns["t"] if v > 0]
        y0 = ref.columns["mean_x2"][0]
        ax.plot(t, [y0 + 4.0 * v / g for v in t], "--", color=colors[g], lw=1)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("M[<x^2>]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


if __name__ == "__main__":
    sys.exit(figure_main("Mean squared position", render))
