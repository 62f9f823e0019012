"""Figure rendering for simulation runs.

Renders a two-panel overview of a directive sequence next to the delimited
output: indicator offsets against the horizontal field of view on top,
subtitle/signer activity below.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulator import RenderDirective, ViewportTrace


def render_run_figure(directives: list[RenderDirective], trace: ViewportTrace,
                      path: str) -> str:
    """Render the run overview to an image file and return its path."""
    times = [d.t.seconds for d in directives]
    yaws = [s.yaw for s in trace.samples]

    def offsets(pick):
        values = []
        for directive in directives:
            part = pick(directive)
            if part is not None and getattr(part, "indicator", None) is not None:
                values.append(part.indicator.relative_azimuth)
            else:
                values.append(math.nan)
        return values

    sub_offsets = offsets(lambda d: d.subtitle)
    signer_offsets = offsets(lambda d: d.signer)
    half_fov = trace.hfov / 2.0

    fig, (ax_top, ax_bottom) = plt.subplots(2, 1, sharex=True, figsize=(10, 6))
    ax_top.axhspan(-half_fov, half_fov, color="0.9", label="horizontal FOV")
    ax_top.plot(times, yaws, color="0.5", linestyle="--", label="viewport yaw")
    ax_top.plot(times, sub_offsets, color="tab:blue", label="subtitle offset")
    ax_top.plot(times, signer_offsets, color="tab:orange", label="signer offset")
    ax_top.set_ylabel("degrees")
    ax_top.set_ylim(-185, 185)
    ax_top.legend(loc="upper right", fontsize="small")

    sub_active = [0 if d.subtitle is None else 1 for d in directives]
    signer_visible = [0 if d.signer is None or not d.signer.visible else 1
                      for d in directives]
    ax_bottom.step(times, sub_active, where="post", color="tab:blue",
                   label="subtitle shown")
    ax_bottom.step(times, [v + 1.5 for v in signer_visible], where="post",
                   color="tab:orange", label="signer visible")
    ax_bottom.set_yticks([0, 1, 1.5, 2.5], ["off", "on", "off", "on"])
    ax_bottom.set_xlabel("media time [s]")
    ax_bottom.legend(loc="upper right", fontsize="small")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
