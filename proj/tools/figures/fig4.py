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


"""Asymptotic state-diffusion variance against gamma with power-law guides.

Each input must carry a `# fit kind=asymptotic-variance` line written by
`noisytb fit --kind asymptotic-variance`.
"""

import sys

from ntbcsv import SchemaError, figure_main

KAPPA_GUIDE = 1.76


def render(plt, data):
    pts = []
    for s in data:
        v = s.fit_value("asymptotic-variance")
        if v is None:
            raise SchemaError(f"{s.path}: no asymptotic-variance fit line")
        pts.append((s.gamma, v))
    pts.sort()
    g = [p[0] for p in pts]
    v = [p[1] for p in pts]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(g, v, "o", color="C0", label="state diffusion, gamma t >= 40")
    ax.plot(g, [4.0 / (x * x) for x in g], "-", color="0.3", lw=1, label="4 / gamma^2")
    ax.plot(g, [v[0] * (x / g[0]) ** -KAPPA_GUIDE for x in g], "--", color="0.3", lw=1,
            label=f"gamma^-{KAPPA_GUIDE}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("gamma")
    ax.set_ylabel("asymptotic M[sigma^2]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


if __name__ == "__main__":
    sys.exit(figure_main("Asymptotic width scaling", render, min_inputs=2))
