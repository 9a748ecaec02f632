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


"""Squared centre of mass in the white-noise potential with a t^(1/2) guide."""

import sys

from ntbcsv import figure_main


def render(plt, data):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for i, s in enumerate(data):
        pts = [(t, y) for t, y in zip(s.columns["t"], s.columns["mean_x_sq"]) if t > 0 and y > 0]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o", ms=3, color=f"C{i}",
                label=f"gamma = {s.gamma:g}, {s.meta.get('run.trajectories', '?')} trajectories")
        t_end, y_end = pts[-1]
        guide = [p[0] for p in pts if p[0] >= t_end / 100.0]
        ax.plot(guide, [y_end * (t / t_end) ** 0.5 for t in guide], "-", color="0.6", lw=2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("M[<x>^2]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


if __name__ == "__main__":
    sys.exit(figure_main("Squared centre of mass", render))
