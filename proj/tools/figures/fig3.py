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


"""Quantum variance in state diffusion against gamma t, with jump-model levels."""

import sys

from ntbcsv import figure_main


def render(plt, data):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for i, s in enumerate(sorted(data, key=lambda s: s.gamma)):
        g = s.gamma
        pts = [(g * t, v) for t, v in zip(s.columns["t"], s.columns["mean_var"]) if t > 0]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "-", color=f"C{i}",
                label=f"gamma = {g:g}")
        ax.axhline(4.0 / (g * g), color="0.6", lw=1, ls=":")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("gamma t")
    ax.set_ylabel("M[sigma^2]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


if __name__ == "__main__":
    sys.exit(figure_main("State-diffusion quantum variance", render))
