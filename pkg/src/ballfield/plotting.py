"""PNG figures drawn from the same tables the CLI writes as CSV."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps repeated renders identical on one matplotlib build
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def sphere_spectrum(path, radii, ells, values, title=""):
    """C_l(r) against r, one curve per degree; values[i, j] at radii[i], ells[j]."""
    fig, ax = plt.subplots(figsize=(6, 4))
    values = np.asarray(values)
    colors = plt.cm.viridis(np.linspace(0, 0.95, len(ells)))
    for j, ell in enumerate(ells):
        ax.plot(radii, values[:, j], marker="o", ms=3, color=colors[j], label=f"l={ell}")
    ax.set_xlabel("r")
    ax.set_ylabel("C_l(r)")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def chebyshev_spectrum(path, series, title=""):
    """b_l against l; ``series`` maps a label to (ells, b)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (ells, b) in series.items():
        ax.plot(ells, b, marker="o", ms=3, label=label)
    ax.set_xlabel("l")
    ax.set_ylabel("b_l")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)


def surface(path, y1, y2, z, title="", label=""):
    """Filled contour of z over the (y1, y2) grid; z has shape (len(y1), len(y2))."""
    fig, ax = plt.subplots(figsize=(5, 4.3))
    Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
    cs = ax.contourf(Y1, Y2, z, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax, label=label)
    ax.set_xlabel("y1")
    ax.set_ylabel("y2")
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save(fig, path)


def spectrum_estimate(path, ells, est, se, theory, title=""):
    """Estimated C_l with 2-SE bars against the input spectrum."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(ells, est, yerr=2 * np.asarray(se), fmt="o", ms=3, capsize=2, label="estimate")
    ax.plot(ells, theory, "k-", lw=1, label="input")
    ax.set_xlabel("l")
    ax.set_ylabel("C_l")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(fontsize=8)
    return _save(fig, path)


def realization_values(path, u, v, values, xlabel="x", ylabel="y", title=""):
    """Scatter of the first realization's real part over plane coordinates (u, v)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    c = np.real(np.asarray(values)[0])
    if c.ndim > 1:
        c = c[:, 0]
    sc = ax.scatter(u, v, c=c, s=12, cmap="coolwarm")
    fig.colorbar(sc, ax=ax, label="Re T")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    return _save(fig, path)
