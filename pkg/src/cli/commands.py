"""
CLI Interface for glupoly
Provides command-line access to the recursion, polynomial, dynamics and zero engines
"""

import click
import sys
from pathlib import Path
from colorama import init, Fore, Style

# Initialize colorama for Windows color support
init(autoreset=True)

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent.parent))
from src import __version__
from src.core.config_manager import config
from src.core.engine import RunResult, engine
from src.core.errors import GlupolyError
from src.utils.logger import logger

USAGE_EXIT_CODE = 64


def print_success(message):
    """Print success message in green"""
    click.echo(f"{Fore.GREEN}✓ {message}{Style.RESET_ALL}")


def print_error(message):
    """Print error message in red"""
    click.echo(f"{Fore.RED}✗ {message}{Style.RESET_ALL}")


def print_info(message):
    """Print info message in blue"""
    click.echo(f"{Fore.CYAN}ℹ {message}{Style.RESET_ALL}")


def print_warning(message):
    """Print warning message in yellow"""
    click.echo(f"{Fore.YELLOW}⚠ {message}{Style.RESET_ALL}")


def precision_ladder(bits):
    """Doubling ladder from double precision up to the requested bit count"""
    ladder = [53]
    while ladder[-1] * 2 < bits:
        ladder.append(ladder[-1] * 2)
    if bits > ladder[-1]:
        ladder.append(bits)
    return ladder


def report(result: RunResult) -> int:
    """Print a RunResult and hand back its exit code"""
    if result.payload:
        click.echo(result.payload, nl=not result.payload.endswith("\n"))
    if result.success:
        print_success(result.message)
    else:
        print_error(result.message)
    for path in result.files:
        print_info(f"Wrote {path}")
    return result.exit_code


def output_path(ctx, out):
    return out or ctx.obj.get("out")


data_option = click.option('--data', '-d', required=True, help='Gluing data JSON file or catalog name')
start_option = click.option('--start', '-s', default=None, help='Start graph text file (defaults to the catalog start)')
levels_option = click.option('--levels', '-n', type=click.IntRange(min=0), required=True, help='Recursion level')
out_option = click.option('--out', '-o', default=None, help='Output path')
lambda_option = click.option('--lambda', 'lam', required=True, help='Activity as re,im')


@click.group()
@click.version_option(version=__version__, prog_name='glupoly')
@click.option('--seed', type=int, default=None, help='Seed for all random directions and phases')
@click.option('--budget-vertices', type=click.IntRange(min=1), default=None, help='Vertex budget for built graphs')
@click.option('--budget-brute', type=click.IntRange(min=1), default=None, help='Vertex budget for brute-force enumeration')
@click.option('--budget-degree', type=click.IntRange(min=1), default=None, help='Degree budget for exact polynomials')
@click.option('--precision', type=click.IntRange(min=53), default=None, help='Highest root polishing precision in bits')
@click.option('--out', 'global_out', default=None, help='Default output path for subcommands')
@click.option('--verbose', '-v', is_flag=True, help='Show debug messages on the console')
@click.pass_context
def cli(ctx, seed, budget_vertices, budget_brute, budget_degree, precision, global_out, verbose):
    """
    glupoly - Independence polynomials of recursively glued graphs

    Builds graph recursions from gluing data, computes conditioned independence
    polynomials exactly, iterates the induced projective map and locates zeros.
    """
    ctx.ensure_object(dict)
    ctx.obj["out"] = global_out
    overrides = {
        'run.seed': seed,
        'budgets.build_vertices': budget_vertices,
        'budgets.brute_force_vertices': budget_brute,
        'budgets.poly_degree': budget_degree,
        'zeros.precision_ladder': precision_ladder(precision) if precision else None,
    }
    for key, value in overrides.items():
        if value is not None:
            config.set(key, value, save_immediately=False)
            logger.debug(f"Override {key} = {value}")
    if verbose:
        logger.set_console_level("DEBUG")


@cli.command()
@data_option
@out_option
@click.pass_context
def validate(ctx, data, out):
    """Validate gluing data"""
    return report(engine.validate(data, output_path(ctx, out)))


@cli.command()
@data_option
@out_option
@click.pass_context
def classify(ctx, data, out):
    """Classify gluing data (non-degenerate, stable, expanding)"""
    return report(engine.classify(data, output_path(ctx, out)))


@cli.command()
@data_option
@out_option
@click.pass_context
def portrait(ctx, data, out):
    """Write the label portrait as DOT"""
    return report(engine.portrait(data, output_path(ctx, out)))


@cli.command()
@data_option
@start_option
@levels_option
@out_option
@click.option('--dot', is_flag=True, help='Emit DOT instead of graph text')
@click.pass_context
def build(ctx, data, start, levels, out, dot):
    """Build G_n"""
    return report(engine.build(data, start, levels, output_path(ctx, out), dot))


@cli.command()
@data_option
@start_option
@levels_option
@click.option('--entry', '-e', default=None, help='Single mark assignment such as 01')
@out_option
@click.pass_context
def poly(ctx, data, start, levels, entry, out):
    """Exact conditioned independence polynomials of G_n"""
    return report(engine.poly(data, start, levels, entry, output_path(ctx, out)))


@cli.command()
@data_option
@start_option
@levels_option
@out_option
@click.pass_context
def zeros(ctx, data, start, levels, out):
    """Zero atlas of Z_{G_n} with the boundedness verdict"""
    return report(engine.zeros(data, start, levels, output_path(ctx, out)))


@cli.command()
@data_option
@lambda_option
@start_option
@click.option('--iters', type=click.IntRange(min=1), default=None, help='Maximum orbit length')
@out_option
@click.pass_context
def dynamics(ctx, data, lam, start, iters, out):
    """Orbit of the start vector under the projective map"""
    return report(engine.dynamics(data, lam, start, iters, output_path(ctx, out)))


@cli.command()
@data_option
@lambda_option
@click.option('--free', required=True, help='Free coordinates a1,a2,... (or re,im;re,im;...)')
@out_option
@click.pass_context
def jacobian(ctx, data, lam, free, out):
    """Jacobian and spectral report at a fixed-manifold point"""
    return report(engine.jacobian(data, lam, free, output_path(ctx, out)))


@cli.command()
@click.option('--start', '-s', required=True, help='Marked graph text file or catalog name')
@out_option
@click.pass_context
def maxindep(ctx, start, out):
    """Check whether a marked graph is maximally independent"""
    return report(engine.maxindep(start, output_path(ctx, out)))


@cli.command()
@data_option
@start_option
@levels_option
@out_option
@click.pass_context
def separation(ctx, data, start, levels, out):
    """Distances between the marks of G_n"""
    return report(engine.separation(data, start, levels, output_path(ctx, out)))


@cli.command()
@data_option
@start_option
@levels_option
@lambda_option
@out_option
@click.pass_context
def freeenergy(ctx, data, start, levels, lam, out):
    """Free energy log|Z|/|V| per level"""
    return report(engine.freeenergy(data, start, levels, lam, output_path(ctx, out)))


@cli.command()
@click.argument('name', required=False)
@click.option('--list', 'list_entries', is_flag=True, help='List catalog entries')
@out_option
@click.pass_context
def catalog(ctx, name, list_entries, out):
    """List catalog entries or export one (gluing JSON and start graph)"""
    if list_entries or not name:
        for entry in engine.catalog_list():
            click.echo(entry)
        return 0
    return report(engine.catalog_export(name, output_path(ctx, out)))


@cli.command()
def config_show():
    """Show current configuration"""
    click.echo(f"\n{Fore.CYAN}{'=' * 60}{Style.RESET_ALL}")
    click.echo(f"{Fore.CYAN}glupoly Configuration{Style.RESET_ALL}")
    click.echo(f"{Fore.CYAN}{'=' * 60}{Style.RESET_ALL}\n")

    for section, values in sorted(config.snapshot().items()):
        click.echo(f"{Fore.YELLOW}{section}:{Style.RESET_ALL}")
        for key, value in sorted(values.items()):
            click.echo(f"  {key}: {value}")
        click.echo()

    is_valid, errors = config.validate()
    if is_valid:
        print_success("Configuration is valid")
    else:
        for error in errors:
            print_warning(error)
    return 0


@cli.command()
@click.argument('key')
@click.argument('value')
def config_set(key, value):
    """Set configuration value (e.g., config-set zeros.plateau_ratio 1.3)"""
    if config.get(key) is None:
        print_error(f"Unknown configuration key: {key}")
        return 2

    # Parse value type
    if value.lower() in ['true', 'false']:
        value = value.lower() == 'true'
    else:
        for cast in (int, float):
            try:
                value = cast(value)
                break
            except ValueError:
                continue

    config.set(key, value)
    print_success(f"Set {key} = {value}")
    return 0


def run(argv=None) -> int:
    """Invoke the command group and translate the outcome into an exit code"""
    try:
        code = cli.main(args=argv, prog_name='glupoly', standalone_mode=False, obj={})
    except click.UsageError as e:
        e.show()
        return USAGE_EXIT_CODE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        print_error("Aborted")
        return 1
    except GlupolyError as e:
        logger.error(str(e))
        print_error(str(e))
        return e.exit_code
    return code if isinstance(code, int) else 0


if __name__ == '__main__':
    sys.exit(run())
