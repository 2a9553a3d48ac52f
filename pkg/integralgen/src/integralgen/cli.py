"""Command line entry point: integral-gen --bond-lengths 1.326,2.0 --out DIR."""
import sys

import click

from .generate import GeometryRequest, generate


@click.command()
@click.option("--bond-lengths", required=True,
              help="Comma-separated Be-H distances in angstrom.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for FCIDUMP + sidecar files.")
@click.option("--active-electrons", default=4, show_default=True)
@click.option("--active-orbitals", default=4, show_default=True)
def main(bond_lengths, out_dir, active_electrons, active_orbitals):
    rs = [float(tok) for tok in bond_lengths.split(",") if tok.strip()]
    req = GeometryRequest(rs, n_active_electrons=active_electrons,
                          n_active_orbitals=active_orbitals)
    results = generate(req, out_dir)
    failures = 0
    for res in results:
        if "error" in res:
            failures += 1
            click.echo(f"r={res['r_angstrom']}: FAILED {res['error']}", err=True)
        else:
            click.echo(
                f"r={res['r_angstrom']}: E_SCF={res['e_scf']:.8f} "
                f"E_FCI={res['e_fci']:.8f} -> {res['fcidump']}"
            )
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
