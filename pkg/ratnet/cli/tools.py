"""
Utility commands: params, mnist-prep, blobs and pade.
"""

import logging
from typing import Optional, Tuple

import click

from ..exceptions import ConfigError
from ..models import get_suite, param_count, STRUCTURE_SUITES
from ..services.data import gen_blobs, load_idx_images, load_mnist, pca_apply, pca_fit, write_csv_features
from ..services.pade import maclaurin_of_rational, pade_eval, pade_from_taylor
from ..utils.diffcore import seeded_rng
from .main import cli

logger = logging.getLogger(__name__)


@cli.command()
@click.option("--model", "models", multiple=True, help="Model spec; repeat for several")
@click.option("--in-dim", type=int, default=None, help="Input dimension")
@click.option("--out-dim", type=int, default=None, help="Output dimension")
@click.option("--suite", default=None, help=f"Named structure list: {', '.join(STRUCTURE_SUITES)}")
def params(models: Tuple[str, ...], in_dim: Optional[int], out_dim: Optional[int], suite: Optional[str]):
    """Print exact parameter counts."""
    if suite:
        chosen = get_suite(suite)
        click.echo(f"# {chosen.name}: {chosen.description} ({chosen.n_in} -> {chosen.n_out})")
        for row in chosen.rows:
            count = param_count(row.model, chosen.n_in, chosen.n_out)
            if count != row.params:
                logger.warning(f"{row.model}: computed {count} parameters, suite lists {row.params}")
            click.echo(f"{row.model} | {count}")
        return
    if not models:
        raise ConfigError("Give --model (with --in-dim and --out-dim) or --suite")
    if in_dim is None or out_dim is None:
        raise ConfigError("--in-dim and --out-dim are required with --model")
    if len(models) == 1:
        click.echo(str(param_count(models[0], in_dim, out_dim)))
        return
    for model in models:
        click.echo(f"{model} | {param_count(model, in_dim, out_dim)}")


@cli.command("mnist-prep")
@click.option("--images", required=True, type=click.Path(dir_okay=False), help="IDX image file (optionally .gz)")
@click.option("--labels", required=True, type=click.Path(dir_okay=False), help="IDX label file (optionally .gz)")
@click.option("--pca", "components", type=int, default=20, show_default=True, help="PCA components; 0 keeps raw pixels")
@click.option("--fit-images", type=click.Path(dir_okay=False), default=None,
              help="IDX image file to fit the PCA on (default: --images); use the training images for test splits")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Feature CSV to write")
def mnist_prep(images: str, labels: str, components: int, fit_images: Optional[str], out_path: str):
    """Convert MNIST IDX files into a feature CSV (PCA stands in for a learned feature extractor)."""
    dataset = load_mnist(images, labels)
    if components < 0:
        raise ConfigError(f"--pca must be >= 0, got {components}")
    if components:
        fit_source = load_idx_images(fit_images) if fit_images else dataset.features
        model = pca_fit(fit_source, components)
        logger.info(f"PCA-{components} explained variance ratio {model.explained_variance_ratio:.4f}")
        dataset = dataset.with_features(pca_apply(model, dataset.features), extractor=f"pca{components}")
    write_csv_features(dataset, out_path)
    click.echo(f"Wrote {len(dataset)} rows with {dataset.dim} features to {out_path}")


@cli.command()
@click.option("--classes", type=int, default=3, show_default=True)
@click.option("--per-class", type=int, default=500, show_default=True)
@click.option("--spread", type=float, default=0.25, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def blobs(classes: int, per_class: int, spread: float, seed: int, out_path: str):
    """Write a synthetic Gaussian-blobs dataset as a feature CSV."""
    dataset = gen_blobs(classes, per_class, spread, seeded_rng(seed))
    write_csv_features(dataset, out_path)
    click.echo(f"Wrote {len(dataset)} rows to {out_path}")


def _parse_floats(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"Expected comma-separated numbers, got '{text}'")


@cli.command()
@click.option("--taylor", required=True, help="Taylor coefficients c0,c1,...")
@click.option("--L", "L", type=int, required=True, help="Numerator degree")
@click.option("--M", "M", type=int, required=True, help="Denominator degree")
@click.option("--eval", "points", type=float, multiple=True, help="Evaluate at x (repeatable)")
@click.option("--maclaurin", type=int, default=None, help="Print series coefficients through order K")
def pade(taylor: str, L: int, M: int, points: Tuple[float, ...], maclaurin: Optional[int]):
    """Padé approximant [L/M] of a power series."""
    approximant = pade_from_taylor(_parse_floats(taylor), L, M)
    click.echo("a = " + ", ".join(f"{value:.17g}" for value in approximant.a))
    click.echo("b = " + ", ".join(f"{value:.17g}" for value in approximant.b))
    for x in points:
        click.echo(f"p({x:g}) = {pade_eval(approximant, x):.17g}")
    if maclaurin is not None:
        series = maclaurin_of_rational(approximant, maclaurin)
        click.echo("d = " + ", ".join(f"{value:.17g}" for value in series))
