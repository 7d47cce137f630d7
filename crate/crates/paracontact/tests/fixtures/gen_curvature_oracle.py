"""Regenerates curvature_oracle.json.

Builds the g-natural metric on T1M in explicit coordinates (base chart x,
stereographic fibre chart w), differentiates it with jax and returns the
Riemann tensor in the adapted frame {u^h, e_1^h, e_1^t, ...} at x = 0,
u = e_0. Nothing here uses the closed-form curvature blocks.

    python3 gen_curvature_oracle.py > curvature_oracle.json
"""
import json

import jax
import jax.numpy as jnp
import numpy as np

jax.config.update("jax_enable_x64", True)


def const_metric(dim, cbar):
    return lambda x: (1 + cbar * (x @ x) / 4) ** (-2) * jnp.eye(dim)


def cpx_metric(dim, chol):
    m = dim // 2

    def g(x):
        z = x[0::2] + 1j * x[1::2]
        q = 1 + chol / 4 * jnp.vdot(z, z).real
        h = jnp.eye(m) / q - (chol / 4) * jnp.outer(jnp.conj(z), z) / q**2
        a, b = h.real, h.imag
        out = jnp.zeros((dim, dim))
        return (
            out.at[0::2, 0::2].set(a.T)
            .at[1::2, 1::2].set(a.T)
            .at[0::2, 1::2].set(-b.T)
            .at[1::2, 0::2].set(b.T)
        )

    return g


def christoffel(gmat):
    def gam(x):
        dg = jax.jacfwd(gmat)(x)
        gi = jnp.linalg.inv(gmat(x))
        t = dg.transpose(2, 0, 1)
        return 0.5 * jnp.einsum(
            "kl,lij->kij", gi,
            jnp.einsum("ilj->lij", t) + jnp.einsum("jli->lij", t) - t,
        )

    return gam


def riemann(chr_):
    def riem(p):
        g = chr_(p)
        dg = jax.jacfwd(chr_)(p)
        return (
            jnp.einsum("dbca->dabc", dg) - jnp.einsum("dacb->dabc", dg)
            + jnp.einsum("dae,ebc->dabc", g, g) - jnp.einsum("dbe,eac->dabc", g, g)
        )

    return riem


def inv_sqrt(mat):
    return jnp.linalg.inv(jnp.linalg.cholesky(mat)).T


def frame_r4(dim, gmat, a, b, c, d):
    n = dim - 1
    gam = christoffel(gmat)

    def sphere(w):
        q = w @ w
        return jnp.concatenate([jnp.array([(1 - q) / (1 + q)]), 2 * w / (1 + q)])

    def unit(p):
        return inv_sqrt(gmat(p[:dim])) @ sphere(p[dim:])

    def gt(p):
        x = p[:dim]
        v = unit(p)
        jac = jax.jacfwd(unit)(p)
        g = gmat(x)
        xh = jnp.concatenate([jnp.eye(dim), jnp.zeros((dim, n))], axis=1)
        yv = jac + jnp.einsum("kij,ia,j->ka", gam(x), xh, v)
        gv = g @ v
        return (
            (a + c) * xh.T @ g @ xh
            + d * jnp.outer(xh.T @ gv, xh.T @ gv)
            + b * (xh.T @ g @ yv + yv.T @ g @ xh)
            + a * yv.T @ g @ yv
        )

    p0 = jnp.zeros(dim + n)
    rc = np.array(riemann(christoffel(gt))(p0))
    gm = np.array(gt(p0))
    size = 2 * dim - 1
    e = np.zeros((dim + n, size))
    e[0, 0] = 1
    for i in range(1, dim):
        e[i, 2 * i - 1] = 1
        e[dim + i - 1, 2 * i] = 0.5
    return np.einsum("dabc,de,ai,bj,ck,el->ijkl", rc, gm, e, e, e, e)


def paracontact_d(a, b, c):
    return -4 * (a * (a + c) - b * b) - (a + c)


CASES = [
    (3, "const", 0.5, (1.0, 0.7, -2.0, None)),
    (3, "const", -1.0, (1.0, 0.0, -2.0, None)),
    (3, "const", 0.0, (1.0, 1.5, 1.0, None)),
    (4, "const", -2.0, (-0.7, 0.3, 0.2, None)),
    (4, "cpx", -4.0, (2.0, 3.0, 2.0, None)),
    (4, "cpx", -1.7, (1.3, 0.4, -2.1, None)),
    (4, "cpx", 2.5, (0.9, -1.1, 0.3, 2.0)),
]


def main():
    out = []
    for dim, kind, k, (a, b, c, d) in CASES:
        if d is None:
            d = paracontact_d(a, b, c)
        gmat = const_metric(dim, k) if kind == "const" else cpx_metric(dim, k)
        r4 = frame_r4(dim, gmat, a, b, c, d)
        out.append({
            "dim": dim,
            "model": f"{kind}:{k}",
            "params": [a, b, c, d],
            "r4": [float(v) for v in r4.ravel()],
        })
    print(json.dumps(out))


if __name__ == "__main__":
    main()
