# first line: 121
@mem.cache
def _diagonalize(
    reduced_field: float, x_max: float, points: int, n_levels: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Three-point finite differences for -d^2/dx^2 - 2/x + F x in units of
    R and r_B, with Dirichlet walls at x = 0 and x = x_max.
    """
    h = x_max / (points + 1)
    x = h * np.arange(1, points + 1)
    diagonal = 2 / h**2 - 2 / x + reduced_field * x
    off_diagonal = np.full(points - 1, -1 / h**2)
    energies, vectors = eigh_tridiagonal(
        diagonal, off_diagonal, select="i", select_range=(0, n_levels - 1)
    )
    vectors = vectors.T / np.sqrt(h)
    vectors *= np.sign(vectors[:, :1])
    return energies, vectors
