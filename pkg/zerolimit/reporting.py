#
#    This file is part of zerolimit.
#
#    zerolimit is free software: you can redistribute it and/or modify
#    it under the terms of the GNU Lesser General Public License as
#    published by the Free Software Foundation, either version 3 of
#    the License, or (at your option) any later version.
#
#    zerolimit is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
#    GNU Lesser General Public License for more details.
#
#    You should have received a copy of the GNU Lesser General Public
#    License along with zerolimit. If not, see <http://www.gnu.org/licenses/>.
#
"""Writers for the files a run leaves in its output directory."""
import csv
import json
import os
import platform

import numpy as np
import scipy

import zerolimit


def _default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError("cannot serialise {0!r}".format(value))


def write_json(path, document):
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True, default=_default)
        f.write("\n")


def write_manifest(directory, config, command, files):
    """Records everything needed to regenerate the directory."""
    write_json(os.path.join(directory, "manifest.json"), {
        "command": command,
        "config": config.to_dict(),
        "config_digest": config.digest(),
        "seed": config.seed,
        "version": zerolimit.__version__,
        "revision": zerolimit.__revision__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "files": sorted(files),
    })


def write_error(directory, error):
    """Writes ``error.json`` from a ZeroLimitError."""
    os.makedirs(directory, exist_ok=True)
    write_json(os.path.join(directory, "error.json"), error.record())


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_rows(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_overlay(path, limit, aggregates):
    """SVG of the level curve over the kept zero atoms.

    :returns: False when matplotlib is not installed."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        zerolimit.logger.warning("matplotlib not installed, no overlay "
                                 "written.")
        return False
    fig, ax = plt.subplots(figsize=(6, 6))
    for aggregate in aggregates:
        points = [rec.atoms[0] for rec in aggregate.records
                  if rec.atoms is not None]
        if points:
            z = np.concatenate(points)
            ax.scatter(z.real, z.imag, s=2, alpha=0.4,
                       label="n={0}".format(aggregate.n))
    for segment, weight in zip(limit.segments, limit.weights):
        ax.plot([segment.start.real, segment.end.real],
                [segment.start.imag, segment.end.imag],
                color="red" if segment.degenerate else "black", lw=1)
    if aggregates:
        r = aggregates[0].r
        theta = np.linspace(0, 2 * np.pi, 400)
        ax.plot(r * np.cos(theta), r * np.sin(theta), ls=":", color="grey")
        ax.legend(loc="upper right", fontsize="small")
    xmin, xmax, ymin, ymax = limit.window
    ax.set_xlim(xmin, xmax)
    ax.set_ylim(ymin, ymax)
    ax.set_aspect("equal")
    # Fixed element ids and no date keep the file reproducible
    with matplotlib.rc_context({"svg.hashsalt": "zerolimit"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return True
