"""Brute-force reference computations used by the tests.

Nothing here calls into pointer_lab: wavefunctions are sampled on a grid and
integrated numerically, density matrices are built as explicit arrays.
"""
import numpy as np

_integrate = getattr(np, "trapezoid", None) or np.trapz


def waist_packet(x, x0, p, sigma, hbar=1.0):
    """Minimum-uncertainty Gaussian sampled on grid ``x``."""
    return (2 * np.pi * sigma**2) ** -0.25 * np.exp(
        -((x - x0) ** 2) / (4 * sigma**2) + 1j * p * (x - x0) / hbar)


def free_propagate(psi, x, t, mass, hbar=1.0):
    """Exact free evolution of a sampled wavefunction via FFT."""
    dx = x[1] - x[0]
    k = 2 * np.pi * np.fft.fftfreq(len(x), d=dx)
    return np.fft.ifft(np.fft.fft(psi) * np.exp(-1j * hbar * k**2 * t / (2 * mass)))


def inner(psi1, psi2, x):
    return _integrate(np.conj(psi1) * psi2, x)


def position_moments(psi, x):
    """(mean, std) of |psi|^2 by quadrature; variance taken about the mean."""
    rho = np.abs(psi) ** 2
    norm = _integrate(rho, x)
    mean = _integrate(x * rho, x) / norm
    var = _integrate((x - mean) ** 2 * rho, x) / norm
    return mean, np.sqrt(var)


def partial_trace_oracle(c1, c2, z):
    """Reduced system state of c1|1>|g1> + c2|2>|g2> with <g1|g2> = z.

    The pointer pair is Gram-Schmidt orthogonalized into a 2-d basis, the
    4x4 bipartite density matrix is built explicitly and the pointer is traced
    out numerically.
    """
    g1 = np.array([1.0, 0.0], dtype=complex)
    g2 = np.array([z, np.sqrt(max(0.0, 1 - abs(z) ** 2))], dtype=complex)
    s1 = np.array([1.0, 0.0], dtype=complex)
    s2 = np.array([0.0, 1.0], dtype=complex)
    psi = c1 * np.kron(s1, g1) + c2 * np.kron(s2, g2)
    rho = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2)
    red = np.einsum("ajbj->ab", rho)
    return red / np.trace(red)
