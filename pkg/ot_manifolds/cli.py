"""CLI interface for OT-manifold certification."""

import functools
import sys

import click
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__
from .certificates import EXIT_CODES, EXIT_INPUT_ERROR, Certificate, Verdict
from .config import ConfigError, load_config
from .errors import FieldError, NotAUnitError, PolynomialError, RootCertificationError
from .logging_config import get_logger, setup_logging
from .pipelines import CertificationRunner
from .validators import ValidationError, Validator

# Certificates own stdout; everything human-readable goes to stderr.
console = Console(stderr=True)
logger = get_logger(__name__)

VERDICT_STYLES = {
    Verdict.PASS: 'green',
    Verdict.FAIL: 'red',
    Verdict.INCONCLUSIVE: 'yellow',
}

INPUT_ERRORS = (ValidationError, ConfigError, PolynomialError, NotAUnitError)


@click.group()
@click.version_option(__version__, prog_name='ot-manifolds')
@click.option('--config', '-c', type=click.Path(), help='Path to configuration file')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                                               case_sensitive=False),
              help='Override monitoring.log_level')
@click.pass_context
def cli(ctx, config, log_level):
    """Certify Oeljeklaus-Toma manifold constructions.

    Every command reads a YAML/JSON spec file and writes a deterministic JSON
    certificate. Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 input error.
    """
    ctx.ensure_object(dict)
    # Config loading logs; stdout must stay reserved for the certificate.
    setup_logging()
    try:
        cfg = load_config(config)
        if log_level:
            cfg.set('monitoring', 'log_level', value=log_level.upper())
        cfg.validate()
    except ConfigError as e:
        console.print(f"[red]Configuration error:[/red] {escape(str(e))}")
        sys.exit(EXIT_INPUT_ERROR)

    setup_logging(cfg.get('monitoring', 'log_level'),
                  json_format=cfg.get('monitoring', 'json_logs', default=True),
                  log_file=cfg.get('monitoring', 'log_file'))
    ctx.obj['config'] = cfg


def certification_command(name: str):
    """Register ``name`` with the shared spec argument and run options."""

    def decorator(func):
        @cli.command(name)
        @click.argument('spec_path', type=click.Path())
        @click.option('--seed', type=int, help='Seed for every randomized check (default 0)')
        @click.option('--bits', type=click.IntRange(min=Validator.MIN_BITS),
                      help='Working precision in bits (default 128)')
        @click.option('--trials', type=click.IntRange(min=1),
                      help='Random trials; also caps the other sample counts')
        @click.option('--bound', type=click.IntRange(min=0),
                      help='Coefficient box for unit search (default 5)')
        @click.option('--workers', type=click.IntRange(min=1), help='Search worker threads')
        @click.option('--out', '-o', type=click.Path(), help='Write the certificate here')
        @click.pass_context
        @functools.wraps(func)
        def command(ctx, spec_path, seed, bits, trials, bound, workers, out):
            runner = CertificationRunner(ctx.obj['config'], seed=seed, bits=bits, trials=trials,
                                         bound=bound, workers=workers)
            sys.exit(_execute(runner, name, spec_path, out))
        return command

    return decorator


def _execute(runner: CertificationRunner, command: str, spec_path: str, out) -> int:
    try:
        spec = Validator.load_spec(spec_path)
        logger.debug("spec_loaded", command=command, path=spec_path)
        certificate = runner.run(command, spec)
    except INPUT_ERRORS as e:
        console.print(f"[red]Invalid input:[/red] {escape(str(e))}")
        return EXIT_INPUT_ERROR
    except RootCertificationError as e:
        console.print(f"[yellow]Inconclusive:[/yellow] {escape(str(e))}")
        return EXIT_CODES[Verdict.INCONCLUSIVE]
    except FieldError as e:
        console.print(f"[red]Invalid field:[/red] {escape(str(e))}")
        return EXIT_INPUT_ERROR

    text = certificate.write(out)
    if not out:
        click.echo(text, nl=False)
    _print_summary(certificate, out)
    return certificate.exit_code


def _print_summary(certificate: Certificate, out):
    table = Table(title=f"{certificate.command}: {certificate.verdict.value}")
    table.add_column("Check", style="cyan")
    table.add_column("Verdict")
    table.add_column("Note", style="dim")
    for check in certificate.checks:
        style = VERDICT_STYLES[check.verdict]
        table.add_row(check.name, f"[{style}]{check.verdict.value}[/{style}]",
                      escape(check.message))
    console.print(table)
    if out:
        console.print(f"[green]✓[/green] Certificate written to {out}")


@certification_command('signature')
def signature():
    """Signature, certified embeddings and irreducibility of a field."""


@certification_command('units')
def units():
    """Log map and Dirichlet rank of given or searched units."""


@certification_command('admissible')
def admissible():
    """Admissibility of a unit system (projected log determinant)."""


@certification_command('build-ot')
def build_ot():
    """Assemble OT data and verify the action, associativity and leaves."""


@certification_command('check-form')
def check_form():
    """ddc, invariance, semipositivity and kernel of the OT form."""


@certification_command('inoue')
def inoue():
    """Inoue surface from a 3x3 matrix or a cubic unit.

    \b
    matrix: [0, 0, 1, 1, 0, 1, 0, 1, 0]
    or
    field: {defining: [-1, -1, 0, 1]}
    unit: [0, 1]
    """


@certification_command('embed')
def embed():
    """Embed the Inoue surface of a (1,1) subfield into an OT manifold."""


@certification_command('probe')
def probe():
    """Report the signature of Q(eta) for each candidate eta."""


def main():
    """Main entry point for the CLI.

    Usage errors exit with 3 so that 2 always means Inconclusive.
    """
    try:
        code = cli.main(standalone_mode=False)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_INPUT_ERROR)
    except click.Abort:
        console.print("[yellow]Aborted[/yellow]")
        sys.exit(EXIT_INPUT_ERROR)
    except Exception as e:
        console.print(f"[red bold]Error:[/red bold] {escape(str(e))}")
        sys.exit(EXIT_INPUT_ERROR)
    sys.exit(code or 0)


if __name__ == '__main__':
    main()
