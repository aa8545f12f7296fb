#!/usr/bin/env python3
# Copyright (c) 2026 The topocut Authors.
# Licensed under the Apache License 2.0.
"""Offline generator for the bundled molecular Pauli Hamiltonians.

Requires pyscf and openfermion. Qubits are ordered spin-block (all alpha
spin orbitals, then all beta) and qubit 0 is written as the leftmost
character of each Pauli string. The companion *.ref file stores the
ground energy of the qubit Hamiltonian in the electron-number sector that
contains the true minimum (dense diagonalization over all 2^n states).
"""
import argparse
import pathlib

import numpy as np
import openfermion as of
from pyscf import ao2mo, gto, scf

MOLECULES = {
    "h2_4q_jw": dict(atoms="H 0 0 0; H 0 0 0.7414", mapping="jw",
                     core=0, active=2, name="H2",
                     geometry="H(0,0,0); H(0,0,0.7414)"),
    "lih_4q_parity": dict(atoms="Li 0 0 0; H 0 0 3.4", mapping="parity",
                          core=1, active=2, name="LiH",
                          geometry="Li(0,0,0); H(0,0,3.4)"),
    "lih_6q_jw": dict(atoms="Li 0 0 0; H 0 0 3.4", mapping="jw",
                      core=1, active=3, name="LiH",
                      geometry="Li(0,0,0); H(0,0,3.4)"),
    "beh2_6q_jw": dict(atoms="H 0 0 -1.33; Be 0 0 0; H 0 0 1.33",
                       mapping="jw", core=1, active=3, name="BeH2",
                       geometry="H(0,0,-1.33); Be(0,0,0); H(0,0,1.33)"),
}


def qubit_hamiltonian(molecule):
    mol = gto.M(atom=molecule["atoms"], basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run(verbose=0)
    c = mf.mo_coeff
    n_mo = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), n_mo)
    # openfermion convention: two_body[p,q,r,s] = (ps|qr)
    two = np.asarray(eri.transpose(0, 2, 3, 1), order="C")
    core = list(range(molecule["core"]))
    active = list(range(molecule["core"], molecule["core"] + molecule["active"]))
    const, h1a, h2a = of.ops.representations.get_active_space_integrals(
        h1, two, core, active)
    one_so, two_so = of.chem.molecular_data.spinorb_from_spatial(h1a, h2a)
    op = of.InteractionOperator(mol.energy_nuc() + const, one_so, 0.5 * two_so)
    ferm = of.reorder(of.get_fermion_operator(op), of.up_then_down)
    n = 2 * molecule["active"]
    if molecule["mapping"] == "jw":
        q = of.jordan_wigner(ferm)
    else:
        q = of.binary_code_transform(ferm, of.parity_code(n))
    q.compress(1e-12)
    return n, q


def pauli_lines(n, q):
    lines = []
    for term, coeff in sorted(q.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        assert abs(coeff.imag) < 1e-12
        chars = ["I"] * n
        for idx, p in term:
            chars[idx] = p
        lines.append(f"{coeff.real:.16e} {''.join(chars)}")
    return lines


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for key, molecule in MOLECULES.items():
        n, q = qubit_hamiltonian(molecule)
        mapping = "Jordan-Wigner" if molecule["mapping"] == "jw" else "Parity"
        body = [f"# molecule={molecule['name']}", "# basis=sto3g",
                f"# mapping={mapping}", f"# geometry={molecule['geometry']}",
                f"# active_orbitals={molecule['active']} frozen_core={molecule['core']}"]
        body += pauli_lines(n, q)
        (out / f"{key}.txt").write_text("\n".join(body) + "\n")
        mat = of.get_sparse_operator(q, n_qubits=n).toarray()
        e0 = np.linalg.eigvalsh(mat)[0]
        (out / f"{key}.ref").write_text(f"exact_ground_energy={e0:.15f}\n")
        print(key, n, len(q.terms), e0)


if __name__ == "__main__":
    main()
