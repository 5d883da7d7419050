"""
Closed-form scattering amplitudes.

The single-mode generator only contains a, a^+, a^2, a^+2 and a^+ a, so the
scattering operator is a Gaussian unitary. It factorizes exactly as a
displacement, a squeeze and a rotation once the constants of the factors
are taken from its Bogoliubov action (``disentangle``); the printed split
keeps the generator's own constants instead (``split_constants``).

Two evaluators share the split form. The coefficient functions sum the
closed-form double (vacuum) and triple (Fock input) series term by term in
the log domain. The scattering path used by the engines squeezes and displaces photon
columns on a widened truncated space, which stays accurate where the
alternating series lose their digits.

The two-mode ponderomotive operator acts as a beam splitter on the photon
modes with the electron index following the transferred photons.
"""

import cmath
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln, jv

from src.core.exceptions import IndexDomain, SeriesNotConverged, TailTooHeavy
from src.core.types import (
    CouplingSet,
    JointState,
    SeriesControl,
    SplitConstants,
    TruncationConfig,
)
from src.simulation.oracle import boundary_leakage
from src.simulation.state import coherent_amplitudes

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


def _arg(value: complex) -> float:
    return cmath.phase(value) if value != 0 else 0.0


def _log_power(base: float, exponent: np.ndarray) -> np.ndarray:
    """exponent * ln(base) with 0^0 = 1."""
    exponent = np.asarray(exponent)
    if base == 0:
        return np.where(exponent == 0, 0.0, -np.inf)
    return exponent * math.log(base)


def disentangle(coupling: CouplingSet) -> SplitConstants:
    """
    Exact constants of the split form for a single-mode coupling set.

    U^+ a U = mu a + nu a^+ + beta is read off the exponential of the
    3x3 adjoint action of the generator; beta is the displacement and
    (mu, nu) fix the squeeze and the rotation.

    Raises:
        ValueError: If g_p has a real part (the operator is not unitary)
    """
    g, g2, gp = coupling.g_qu, coupling.g_qu2, coupling.g_p
    if abs(gp.real) > 1e-12 * max(1.0, abs(gp)):
        raise ValueError(f"g_p must be imaginary for a unitary scattering, got {gp}")

    adjoint = np.array(
        [
            [-2 * gp, -2 * g2, 0],
            [-2 * np.conj(g2), 2 * gp, 0],
            [g, np.conj(g), 0],
        ],
        dtype=complex,
    )
    mu, nu, beta = expm(adjoint) @ np.array([1, 0, 0], dtype=complex)

    r = math.acosh(max(1.0, abs(mu)))
    psi = -cmath.phase(mu)
    theta = cmath.phase(-nu) - psi if r > 1e-15 else 0.0
    return SplitConstants(
        g_qu_prime=complex(beta),
        g_qu2_prime=0.5 * r * cmath.exp(-1j * theta),
        g_p_prime=0.5j * psi,
        exact=True,
    )


def split_constants(
    coupling: CouplingSet,
    g_qu2_prime: Optional[complex] = None,
    g_p_prime: Optional[complex] = None,
    exact: bool = False,
) -> SplitConstants:
    """
    Constants of the split form.

    g_qu is always kept; an omitted g_qu2' or g_p' falls back to the
    coupling's own g_qu2 or g_p. With ``exact`` the disentangled constants
    are returned instead.

    Raises:
        ValueError: If ``exact`` is combined with modified constants
    """
    if exact:
        if g_qu2_prime is not None or g_p_prime is not None:
            raise ValueError("exact constants cannot be combined with modified ones")
        return disentangle(coupling)
    return SplitConstants(
        g_qu_prime=coupling.g_qu,
        g_qu2_prime=coupling.g_qu2 if g_qu2_prime is None else complex(g_qu2_prime),
        g_p_prime=coupling.g_p if g_p_prime is None else complex(g_p_prime),
    )


def _series_block(
    split: SplitConstants, n: int, p: int, q: int, size: int
) -> np.ndarray:
    """
    Terms of the split-form series at fixed q over j, l < size.

    m = j - q runs from -q; the q = 0 block with n = 0 is the whole
    vacuum double sum. The square root only covers n! / (n + p)!.
    """
    g = abs(split.g_qu_prime)
    r = 2.0 * abs(split.g_qu2_prime)
    half_tanh = 0.5 * math.tanh(r)
    delta_phi = 2.0 * _arg(split.g_qu_prime) + _arg(split.g_qu2_prime)

    j = np.arange(size)[:, None]
    l = np.arange(size)[None, :]
    m = j - q
    rest = 2 * m + l - p
    valid = rest >= 0
    rest = np.where(valid, rest, 0)

    log_mod = (
        0.5 * g * g
        + _log_power(g, rest + l)
        - gammaln(rest + 1)
        - gammaln(l + 1)
        + _log_power(half_tanh, q + j)
        - gammaln(j + 1)
        - gammaln(q + 1)
        - (n - 2 * q + 0.5) * math.log(math.cosh(r))
        + 0.5 * (gammaln(n + 1) - gammaln(n + p + 1))
        + gammaln(n + 2 * m + l + 1)
        - gammaln(n - 2 * q + 1)
    )
    log_mod = np.where(valid, log_mod, -np.inf)
    sign = np.where((l - p + j) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(log_mod) * np.exp(-1j * m * delta_phi)


def series_coefficient(
    split: SplitConstants, n: int, p: int, ctl: Optional[SeriesControl] = None
) -> complex:
    """
    <n + p| D(g_qu') S(g_qu2') R(g_p') |n> from the closed-form series.

    The (j, l) grid starts at |p| + n + 32 per index and doubles until every
    term in its outer half is below term_tol relative to the partial sum
    (floored at the rounding level of the largest term).

    Raises:
        SeriesNotConverged: If the grid would exceed
            2 max_index + n // 2 + |p| per index
    """
    ctl = ctl or SeriesControl()
    cap = 2 * ctl.max_index + n // 2 + abs(p)
    size = min(abs(p) + n + 32, cap)
    while True:
        blocks = [_series_block(split, n, p, q, size) for q in range(n // 2 + 1)]
        total = complex(sum(b.sum() for b in blocks))
        half = size // 2
        peak = max(float(np.abs(b).max()) for b in blocks)
        outer = max(
            max(float(np.abs(b[half:, :]).max()), float(np.abs(b[:, half:]).max()))
            for b in blocks
        )
        if outer <= ctl.term_tol * max(abs(total), EPS * peak):
            break
        if size >= cap:
            logger.error(f"Series for n={n}, p={p} not converged on a {size}-wide grid")
            raise SeriesNotConverged(
                f"split-form series for n={n}, p={p} did not converge by index {cap}",
                n=n,
                p=p,
                max_index=ctl.max_index,
            )
        size = min(2 * size, cap)

    phase = cmath.exp(-split.g_p_prime * (2 * n + 1) + 1j * p * _arg(split.g_qu_prime))
    return phase * total


def squeeze_columns(g_qu2_prime: complex, rows: int, cols: int) -> np.ndarray:
    """
    Matrix <j|exp(g2 a^2 - g2^* a^+2)|n> for j < rows, n < cols.

    The squeeze generator acts on the unit columns in a space padded until
    the squeezed tail tanh(r)^j falls below rounding, so the cut never
    reaches the returned rows.
    """
    out = np.zeros((rows, cols), dtype=complex)
    size = min(rows, cols)
    out[np.arange(size), np.arange(size)] = 1.0
    if g_qu2_prime == 0:
        return out

    t = math.tanh(2.0 * abs(g_qu2_prime))
    pad = 2 * cols + 8
    if t < 1.0:
        pad += math.ceil(2.0 * math.log(EPS) / math.log(t))
    space = rows + pad
    lower = np.sqrt(np.arange(2, space) * np.arange(1, space - 1))
    generator = sparse.diags(
        [-np.conj(g_qu2_prime) * lower, g_qu2_prime * lower],
        [-2, 2],
        format="csr",
        dtype=complex,
    )
    unit = np.zeros((space, cols), dtype=complex)
    unit[:rows] = out
    return expm_multiply(generator, unit)[:rows]


def apply_displacement(beta: complex, columns: np.ndarray) -> np.ndarray:
    """
    D(beta) applied to photon-number columns on their own truncated space.

    The truncated generator stays anti-Hermitian, so the cut only shows up
    as weight reaching the top rows.
    """
    if beta == 0:
        return columns.copy()
    root = np.sqrt(np.arange(1, columns.shape[0]))
    generator = sparse.diags(
        [beta * root, -np.conj(beta) * root], [-1, 1], format="csr", dtype=complex
    )
    return expm_multiply(generator, columns)


def _transfer_at(
    split: SplitConstants, n_in: int, p_rows: int, inner: int
) -> np.ndarray:
    S = squeeze_columns(split.g_qu2_prime, inner + n_in + 1, n_in + 1)[:inner]
    DS = apply_displacement(split.g_qu_prime, S)[:p_rows]
    n = np.arange(n_in + 1)
    return DS * np.exp(-split.g_p_prime * (2 * n + 1))


def _photon_cap(split: SplitConstants, base: int, ctl: SeriesControl) -> int:
    # squeezed tail tanh(r)^j below rounding, displaced by (sqrt(j) + |beta|)^2
    cap = max(base + 2 * ctl.max_index, 4 * base)
    t = math.tanh(2.0 * abs(split.g_qu2_prime))
    if 0.0 < t < 1.0:
        squeeze = base + math.ceil(2.0 * math.log(EPS) / math.log(t))
        cap = max(cap, min(squeeze, base + 100 * ctl.max_index))
    return max(cap, math.ceil((math.sqrt(base) + abs(split.g_qu_prime) + 8.0) ** 2))


def transfer_matrix(
    split: SplitConstants,
    n_in: int,
    p_rows: int,
    ctl: Optional[SeriesControl] = None,
) -> np.ndarray:
    """
    Photon transfer matrix T[P, n] = <P| D S R |n> for P < p_rows, n <= n_in.

    The intermediate photon space is widened until two successive cuts
    agree to term_tol, floored at the rounding level of the widest cut,
    relative to the largest element.

    Raises:
        SeriesNotConverged: If the photon space would outgrow the cap set
            by the squeezed tail, the displacement and max_index
    """
    ctl = ctl or SeriesControl()
    base = max(p_rows, n_in + 1)
    cap = _photon_cap(split, base, ctl)

    inner = base + 32
    current = _transfer_at(split, n_in, p_rows, inner)
    while True:
        wider = inner + max(32, inner // 2)
        if wider > cap:
            logger.error(f"Photon sum not converged within {cap} terms")
            raise SeriesNotConverged(
                f"intermediate photon sum did not converge within {cap} terms",
                max_index=ctl.max_index,
                cap=cap,
            )
        nxt = _transfer_at(split, n_in, p_rows, wider)
        tol = max(ctl.term_tol, EPS * max(1e3, 4.0 * wider))
        scale = max(float(np.max(np.abs(nxt))), 1e-300)
        if float(np.max(np.abs(nxt - current))) <= tol * scale:
            logger.debug(f"Transfer matrix converged with {wider} intermediate photons")
            return nxt
        current, inner = nxt, wider


def _check_domain(n: int, p: np.ndarray) -> None:
    if n < 0:
        raise IndexDomain(f"photon number must be >= 0, got {n}", n=n)
    if p.size and int(p.min()) < -n:
        raise IndexDomain(
            f"n + p must be >= 0; got n={n}, p_min={int(p.min())}",
            n=n,
            p_min=int(p.min()),
        )


def coherent_coefficients(
    coupling: CouplingSet,
    n: int,
    p_range: Tuple[int, int],
    ctl: Optional[SeriesControl] = None,
    g_qu2_prime: Optional[complex] = None,
    g_p_prime: Optional[complex] = None,
    exact: bool = False,
) -> np.ndarray:
    """
    Coefficients C_p^n: amplitude of |E0 - p hbar omega>|n + p> from |E0>|n>.

    Args:
        coupling: Single-mode coupling set
        n: Input photon number
        p_range: Inclusive (p_min, p_max)
        ctl: Series stopping rule
        g_qu2_prime: Modified second-order constant (g_qu2 when omitted)
        g_p_prime: Modified ponderomotive constant (g_p when omitted)
        exact: Use the disentangled constants instead

    Returns:
        Complex array over p_min..p_max

    Raises:
        IndexDomain: If n < 0 or p_min < -n
        SeriesNotConverged: If a series exhausts its index cap
    """
    p = np.arange(p_range[0], p_range[1] + 1)
    _check_domain(n, p)
    split = split_constants(coupling, g_qu2_prime, g_p_prime, exact=exact)
    values = [series_coefficient(split, n, int(x), ctl) for x in p]
    return np.array(values, dtype=complex)


def vacuum_coefficients(
    coupling: CouplingSet,
    p_max: int,
    ctl: Optional[SeriesControl] = None,
    g_qu2_prime: Optional[complex] = None,
    g_p_prime: Optional[complex] = None,
    exact: bool = False,
) -> np.ndarray:
    """Coefficients C_p for vacuum input, p = 0..p_max."""
    return coherent_coefficients(
        coupling,
        0,
        (0, p_max),
        ctl,
        g_qu2_prime=g_qu2_prime,
        g_p_prime=g_p_prime,
        exact=exact,
    )


def strong_field_coefficients(
    g1: complex,
    g2: complex,
    delta_phi: float,
    g_p_prime: complex,
    n: int,
    p_range: Tuple[int, int],
    ctl: Optional[SeriesControl] = None,
) -> np.ndarray:
    """
    Large-n limit: C_p = e^{-g_p'(2n+1)} sum_m e^{i(p phi1 - m delta_phi)}
    J_{p-2m}(2|g1|) J_{-m}(2|g2|), with phi1 = arg(g1).

    Raises:
        IndexDomain: If n < 0
        SeriesNotConverged: If |J_m(2|g2|)| is still above term_tol at max_index
    """
    ctl = ctl or SeriesControl()
    if n < 0:
        raise IndexDomain(f"photon number must be >= 0, got {n}", n=n)
    x1, x2 = 2.0 * abs(g1), 2.0 * abs(g2)
    phi1 = _arg(g1)

    reach = int(math.ceil(x2)) + 1
    while abs(jv(reach, x2)) > ctl.term_tol:
        reach += 1
        if reach > ctl.max_index:
            raise SeriesNotConverged(
                f"Bessel sum over m did not converge by m={ctl.max_index}",
                x=x2,
            )
    m = np.arange(-reach, reach + 1)
    p = np.arange(p_range[0], p_range[1] + 1)

    bessel = jv(p[:, None] - 2 * m[None, :], x1) * jv(-m[None, :], x2)
    phases = np.exp(1j * (p[:, None] * phi1 - m[None, :] * delta_phi))
    total = np.sum(bessel * phases, axis=1)
    return np.exp(-complex(g_p_prime) * (2 * n + 1)) * total


def single_mode_scattering(
    coupling: CouplingSet,
    state: JointState,
    ctl: Optional[SeriesControl] = None,
    split: Optional[SplitConstants] = None,
) -> JointState:
    """
    Scatter a single-mode input with the electron at k = 0.

    Output amplitude of |k, P> is sum_n c_n T[P, n] with k = n - P. Weight
    pushed out of the window is added to the leakage.

    Args:
        coupling: Single-mode coupling set
        state: Input with all weight at k = 0
        ctl: Series stopping rule
        split: Split-form constants (disentangled from ``coupling`` when omitted)

    Raises:
        IndexDomain: If the input has weight away from k = 0
    """
    trunc = state.trunc
    k0 = trunc.k_index(0)
    off_origin = state.norm - float(np.sum(np.abs(state.amps[k0]) ** 2))
    if off_origin > 1e-14:
        raise IndexDomain(
            f"analytic scattering needs the electron at k = 0; "
            f"{off_origin:.3e} lies elsewhere",
            weight=off_origin,
        )

    c = state.amps[k0]
    occupied = np.flatnonzero(np.abs(c) > 0)
    n_in = int(occupied.max()) if occupied.size else 0
    split = split or disentangle(coupling)
    T = transfer_matrix(split, n_in, trunc.n_size, ctl)

    amps = np.zeros(trunc.shape(1), dtype=complex)
    P = np.arange(trunc.n_size)
    for n in occupied:
        k = int(n) - P
        ok = (k >= trunc.k_min) & (k <= trunc.k_max)
        amps[k[ok] - trunc.k_min, P[ok]] += c[n] * T[P[ok], n]

    out = JointState(trunc=trunc, amps=amps, tail_weight=state.tail_weight)
    lost = max(0.0, state.norm - out.norm)
    return JointState(
        trunc=trunc,
        amps=amps,
        tail_weight=state.tail_weight,
        leakage=boundary_leakage(out) + lost,
    )


def beam_splitter_shells(g_p12: complex, n_total: int) -> list:
    """
    Photon beam-splitter matrices on every shell n1 + n2 = N <= n_total.

    Entry [N][n1, m1] is <n1, N-n1| U |m1, N-m1> for
    U = exp(-2 g a1 a2^+ + 2 g^* a1^+ a2) with the electron shifts dropped.
    Columns are built by applying U a1^+ U^+ and U a2^+ U^+ to the shell
    below, so no truncation enters.
    """
    # U a1^+ U^+ = cos(s) a1^+ - e^{i phi} sin(s) a2^+ and
    # U a2^+ U^+ = cos(s) a2^+ + e^{-i phi} sin(s) a1^+ with s = 2|g|
    s = 2.0 * abs(g_p12)
    cos_s, sin_s = math.cos(s), math.sin(s)
    e = cmath.exp(1j * _arg(g_p12))

    shells = [np.ones((1, 1), dtype=complex)]
    for N in range(1, n_total + 1):
        prev = shells[-1]
        cur = np.zeros((N + 1, N + 1), dtype=complex)
        n1 = np.arange(N + 1)
        for m1 in range(N + 1):
            if m1 == 0:
                # raise mode 2 from |0, N-1>
                v = prev[:, 0]
                up1, up2 = np.conj(e) * sin_s, cos_s
                norm = math.sqrt(N)
            else:
                v = prev[:, m1 - 1]
                up1, up2 = cos_s, -e * sin_s
                norm = math.sqrt(m1)
            column = np.zeros(N + 1, dtype=complex)
            column[1:] += up1 * np.sqrt(n1[1:]) * v
            column[:-1] += up2 * np.sqrt(N - n1[:-1]) * v
            cur[:, m1] = column / norm
        shells.append(cur)
    return shells


def compton_element(n1: int, n2: int, k: int, g_p12: complex) -> complex:
    """
    <n1, n2| U |n1 - k, n2 + k> as a finite alternating sum.

    With s = 2|g_p12| the terms are
    (-1)^m sin^{2m+k}(s) cos^{n1+n2-2m-k}(s) / ((m+k)! m! (n1-k-m)! (n2-m)!)
    for max(0, -k) <= m <= min(n1 - k, n2), scaled by
    e^{-ik phi} sqrt(n1! n2! (n1-k)! (n2+k)!). Sine and cosine keep their
    own powers so neither vanishing factor divides by zero.

    Raises:
        IndexDomain: If an input photon number would be negative
    """
    m1, m2 = n1 - k, n2 + k
    if min(n1, n2, m1, m2) < 0:
        raise IndexDomain(
            f"photon numbers must be >= 0; got n=({n1}, {n2}), k={k}", n1=n1, n2=n2, k=k
        )
    s = 2.0 * abs(g_p12)
    sin_s, cos_s = math.sin(s), math.cos(s)
    m = np.arange(max(0, -k), min(m1, n2) + 1)
    sin_pow, cos_pow = 2 * m + k, n1 + n2 - 2 * m - k

    log_mod = (
        _log_power(abs(sin_s), sin_pow)
        + _log_power(abs(cos_s), cos_pow)
        - gammaln(m + k + 1)
        - gammaln(m + 1)
        - gammaln(m1 - m + 1)
        - gammaln(n2 - m + 1)
        + 0.5 * (gammaln(n1 + 1) + gammaln(n2 + 1) + gammaln(m1 + 1) + gammaln(m2 + 1))
    )
    sign = (-1.0) ** m * np.sign(sin_s) ** sin_pow * np.sign(cos_s) ** cos_pow
    total = float(np.sum(np.where(np.isfinite(log_mod), sign * np.exp(log_mod), 0.0)))
    return cmath.exp(-1j * k * _arg(g_p12)) * total


def compton_coefficients(
    alpha1: complex,
    alpha2: complex,
    g_p12: complex,
    trunc: TruncationConfig,
    ctl: Optional[SeriesControl] = None,
) -> JointState:
    """
    Two-mode ponderomotive scattering of |alpha1, alpha2> with the electron at k = 0.

    c_{n1 n2 k} = sum over inputs (m1, m2) = (n1 - k, n2 + k) of the product
    of Poisson amplitudes and the beam-splitter element. Input pairs below
    term_tol relative to the largest pair are skipped. Weight whose k or
    photon numbers fall outside the window counts as leakage.

    Raises:
        TailTooHeavy: If either coherent tail beyond n_max exceeds leak_tol
    """
    ctl = ctl or SeriesControl()
    amps1, tail1 = coherent_amplitudes(alpha1, trunc.n_max)
    amps2, tail2 = coherent_amplitudes(alpha2, trunc.n_max)
    for alpha, tail in ((alpha1, tail1), (alpha2, tail2)):
        if tail > trunc.leak_tol:
            raise TailTooHeavy(
                f"|alpha|^2={abs(alpha) ** 2:.4g} leaves tail {tail:.3e} "
                f"beyond n_max={trunc.n_max}",
                alpha=alpha,
                tail=tail,
            )

    floor = ctl.term_tol * float(np.max(np.abs(amps1)) * np.max(np.abs(amps2)))
    shells = beam_splitter_shells(g_p12, 2 * trunc.n_max)
    amps = np.zeros(trunc.shape(2), dtype=complex)
    skipped = 0
    for N, shell in enumerate(shells):
        lo, hi = max(0, N - trunc.n_max), min(N, trunc.n_max)
        m1 = np.arange(lo, hi + 1)
        inputs = amps1[m1] * amps2[N - m1]
        kept = np.abs(inputs) > floor
        skipped += int(np.count_nonzero(~kept))
        if not np.any(kept):
            continue
        for n1 in range(lo, hi + 1):
            # inputs differ in m1, so every k = n1 - m1 is distinct
            k = n1 - m1
            ok = kept & (k >= trunc.k_min) & (k <= trunc.k_max)
            amps[k[ok] - trunc.k_min, n1, N - n1] += shell[n1, m1[ok]] * inputs[ok]
    tail = 1.0 - (1.0 - tail1) * (1.0 - tail2)
    logger.debug(
        f"Compton amplitudes on {len(shells)} shells, n_max={trunc.n_max}, "
        f"{skipped} input pairs below {floor:.1e}"
    )

    state = JointState(trunc=trunc, amps=amps, mode_count=2, tail_weight=tail)
    input_norm = float(np.sum(np.abs(amps1) ** 2) * np.sum(np.abs(amps2) ** 2))
    lost = max(0.0, input_norm - state.norm)
    return JointState(
        trunc=trunc,
        amps=amps,
        mode_count=2,
        tail_weight=tail,
        leakage=boundary_leakage(state) + lost,
    )


def compton_weak_coupling(k: int, g_p12: complex, n1: float, n2: float) -> complex:
    """Weak-coupling amplitude e^{-i k phi} J_k(4|g| sqrt(n1 n2))."""
    x = 4.0 * abs(g_p12) * math.sqrt(n1 * n2)
    return cmath.exp(-1j * k * _arg(g_p12)) * float(jv(k, x))


def compton_spectrum_fit(k, g_p12: complex, n1: float, n2: float):
    """Electron spectrum J_k^2(4|g| sqrt(n1 n2)) in the weak-coupling limit."""
    return jv(k, 4.0 * abs(g_p12) * math.sqrt(n1 * n2)) ** 2
