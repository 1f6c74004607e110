"""
Model spec grammar, parameter counting and parameter initialization.

Grammar (whitespace ignored):
    ratio:[P/Q,H](,[P/Q,H])*
    mlp:[W,ACT](,[W,ACT])*       ACT in identity, relu, sigmoid, tanh, swish
    rbf:H
The layer list may also be wrapped in one extra pair of brackets, e.g. ratio:[[2/2,8]].
"""

import logging
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..exceptions import ConfigError, SpecSyntaxError
from ..utils.diffcore import Rng, gaussian_array
from .dense import ACTIVATIONS, DenseLayer
from .ratio import DEFAULT_GUARD_EPS, RatioLayer
from .rbf import RBFLayer
from .stack import Stack

logger = logging.getLogger(__name__)

# Denominator weights start at zero; their draws are still consumed so the stream layout is fixed
DENOMINATOR_WEIGHT_STD = 0.0


class RatioLayerSpec(BaseModel):
    """[P/Q,H]: numerator order, denominator order, hidden width."""
    p: int = Field(ge=1)
    q: int = Field(ge=0)
    hidden: int = Field(ge=1)

    def text(self) -> str:
        return f"[{self.p}/{self.q},{self.hidden}]"


class DenseLayerSpec(BaseModel):
    """[W,ACT]: hidden width and activation."""
    width: int = Field(ge=1)
    activation: str

    def text(self) -> str:
        return f"[{self.width},{self.activation}]"


class RBFLayerSpec(BaseModel):
    """H: number of Gaussian units."""
    hidden: int = Field(ge=1)

    def text(self) -> str:
        return str(self.hidden)


class ModelSpec(BaseModel):
    """Parsed description of a network."""
    family: Literal["ratio", "mlp", "rbf"]
    layers: List[Union[RatioLayerSpec, DenseLayerSpec, RBFLayerSpec]]

    @model_validator(mode="after")
    def _check_layers(self) -> "ModelSpec":
        if not self.layers:
            raise ValueError("A model spec needs at least one layer")
        if self.family == "rbf" and len(self.layers) != 1:
            raise ValueError("RBF networks are single-layer")
        expected = {"ratio": RatioLayerSpec, "mlp": DenseLayerSpec, "rbf": RBFLayerSpec}[self.family]
        if not all(isinstance(layer, expected) for layer in self.layers):
            raise ValueError(f"Every layer of a {self.family} spec must be a {expected.__name__}")
        return self

    @property
    def text(self) -> str:
        return f"{self.family}:" + ",".join(layer.text() for layer in self.layers)

    def __str__(self) -> str:
        return self.text


class _Scanner:
    """Cursor over spec text that reports positions as byte offsets."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self, pos: Optional[int] = None) -> int:
        return len(self.text[:self.pos if pos is None else pos].encode("utf-8"))

    def error(self, message: str, pos: Optional[int] = None) -> SpecSyntaxError:
        return SpecSyntaxError(message, self.offset(pos))

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def peek_after(self, char: str) -> str:
        """The next non-space character following `char` at the cursor."""
        self.skip_ws()
        pos = self.pos + 1
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        return self.text[pos] if pos < len(self.text) and self.peek() == char else ""

    def expect(self, char: str) -> None:
        found = self.peek()
        if found != char:
            raise self.error(f"Expected '{char}' but found {repr(found) if found else 'end of input'}")
        self.pos += 1

    def accept(self, char: str) -> bool:
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def integer(self, what: str, minimum: int) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in "0123456789":
            self.pos += 1
        if start == self.pos:
            raise self.error(f"Expected {what} as a decimal integer")
        value = int(self.text[start:self.pos])
        if value < minimum:
            raise self.error(f"{what} must be >= {minimum}, got {value}", start)
        return value

    def word(self) -> Tuple[str, int]:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos], start

    def at_end(self) -> bool:
        return self.peek() == ""


def _parse_ratio_layer(scanner: _Scanner) -> RatioLayerSpec:
    scanner.expect("[")
    p = scanner.integer("numerator order P", 1)
    scanner.expect("/")
    q = scanner.integer("denominator order Q", 0)
    scanner.expect(",")
    hidden = scanner.integer("hidden width H", 1)
    scanner.expect("]")
    return RatioLayerSpec(p=p, q=q, hidden=hidden)


def _parse_dense_layer(scanner: _Scanner) -> DenseLayerSpec:
    scanner.expect("[")
    width = scanner.integer("layer width W", 1)
    scanner.expect(",")
    activation, start = scanner.word()
    if not activation:
        raise scanner.error("Expected an activation name")
    if activation not in ACTIVATIONS:
        raise scanner.error(f"Unknown activation '{activation}' (available: {', '.join(ACTIVATIONS)})", start)
    scanner.expect("]")
    return DenseLayerSpec(width=width, activation=activation)


def parse_model_spec(text: str) -> ModelSpec:
    """
    Parse a model spec such as "ratio:[2/2,8]", "mlp:[64,tanh],[64,tanh]" or "rbf:16".

    Raises:
        SpecSyntaxError: Text that does not follow the grammar, with the byte offset
    """
    scanner = _Scanner(text)
    family, start = scanner.word()
    if family not in ("ratio", "mlp", "rbf"):
        raise scanner.error(f"Unknown model family '{family}' (expected ratio, mlp or rbf)", start)
    scanner.expect(":")

    if family == "rbf":
        hidden = scanner.integer("hidden size H", 1)
        if scanner.peek() == ",":
            raise scanner.error("RBF networks are single-layer; found a second layer")
        if not scanner.at_end():
            raise scanner.error(f"Unexpected trailing input {scanner.peek()!r}")
        return ModelSpec(family="rbf", layers=[RBFLayerSpec(hidden=hidden)])

    parse_layer = _parse_ratio_layer if family == "ratio" else _parse_dense_layer
    wrapped = scanner.peek_after("[") == "["
    if wrapped:
        scanner.expect("[")
    layers = [parse_layer(scanner)]
    while scanner.accept(","):
        layers.append(parse_layer(scanner))
    if wrapped:
        scanner.expect("]")
    if not scanner.at_end():
        raise scanner.error(f"Unexpected trailing input {scanner.peek()!r}")
    return ModelSpec(family=family, layers=layers)


def _coerce_spec(spec: Union[str, ModelSpec]) -> ModelSpec:
    return parse_model_spec(spec) if isinstance(spec, str) else spec


def _check_dims(n_in: int, n_out: int) -> None:
    if n_in < 1 or n_out < 1:
        raise ConfigError(f"Input and output dimensions must be positive, got {n_in} -> {n_out}")


def param_count(spec: Union[str, ModelSpec], n_in: int, n_out: int) -> int:
    """Exact number of trainable scalars of the network described by spec."""
    spec = _coerce_spec(spec)
    _check_dims(n_in, n_out)
    total = 0
    if spec.family == "ratio":
        width = n_in
        for i, layer in enumerate(spec.layers):
            out = n_out if i == len(spec.layers) - 1 else layer.hidden
            total += RatioLayer.expected_param_count(width, layer.hidden, out, layer.p, layer.q)
            width = layer.hidden
    elif spec.family == "mlp":
        width = n_in
        for layer in spec.layers:
            total += DenseLayer.expected_param_count(width, layer.width)
            width = layer.width
        total += DenseLayer.expected_param_count(width, n_out)
    else:
        total += RBFLayer.expected_param_count(n_in, spec.layers[0].hidden, n_out)
    return total


def init_params(
    spec: Union[str, ModelSpec],
    n_in: int,
    n_out: int,
    rng: Rng,
    features: Optional[np.ndarray] = None,
    guard_eps: float = DEFAULT_GUARD_EPS,
) -> Stack:
    """
    Build a stack for spec and draw its initial parameters from rng.

    Ratio layers: numerator weights ~ N(0, 1/sqrt(n)), numerator biases ~ N(0, 0.1),
    denominator weights = 0 and biases = 1 so every D starts at exactly 1, output weights ~ N(0, 1/sqrt(h)), output bias = 0.
    Dense layers: Glorot normal weights, zero bias; an identity output layer is appended.
    RBF layers: centers drawn from the rows of `features` when given, else N(0, 1);
    log widths 0, output weights ~ N(0, 1/sqrt(h)), zero bias.
    """
    spec = _coerce_spec(spec)
    _check_dims(n_in, n_out)
    layers = []

    if spec.family == "ratio":
        width = n_in
        for i, layer_spec in enumerate(spec.layers):
            out = n_out if i == len(spec.layers) - 1 else layer_spec.hidden
            layer = RatioLayer(width, layer_spec.hidden, out, layer_spec.p, layer_spec.q, guard_eps=guard_eps)
            h, p, q = layer_spec.hidden, layer_spec.p, layer_spec.q
            layer.params["num_w"][...] = gaussian_array(rng, (p, h, width), 0.0, 1.0 / np.sqrt(width))
            layer.params["num_b"][...] = gaussian_array(rng, (p, h), 0.0, 0.1)
            layer.params["den_w"][...] = gaussian_array(rng, (q, h, width), 0.0, DENOMINATOR_WEIGHT_STD)
            layer.params["den_b"][...] = 1.0
            layer.params["out_w"][...] = gaussian_array(rng, (out, h), 0.0, 1.0 / np.sqrt(h))
            layer.params["out_b"][...] = 0.0
            layers.append(layer)
            width = h

    elif spec.family == "mlp":
        widths = [(layer.width, layer.activation) for layer in spec.layers] + [(n_out, "identity")]
        width = n_in
        for out, activation in widths:
            layer = DenseLayer(width, out, activation)
            layer.params["w"][...] = gaussian_array(rng, (out, width), 0.0, np.sqrt(2.0 / (width + out)))
            layers.append(layer)
            width = out

    else:
        h = spec.layers[0].hidden
        layer = RBFLayer(n_in, h, n_out)
        if features is not None and len(features) > 0:
            rows = np.minimum((rng.uniforms(h) * len(features)).astype(np.int64), len(features) - 1)
            layer.params["centers"][...] = np.asarray(features, dtype=np.float64)[rows]
        else:
            layer.params["centers"][...] = gaussian_array(rng, (h, n_in), 0.0, 1.0)
        layer.params["out_w"][...] = gaussian_array(rng, (n_out, h), 0.0, 1.0 / np.sqrt(h))
        layers.append(layer)

    stack = Stack(layers)
    logger.debug(f"Initialized {spec.text} ({n_in}->{n_out}) with {stack.param_count} parameters")
    return stack


class SuiteRow(BaseModel):
    model: str
    params: int


class StructureSuite(BaseModel):
    """A list of structures with fixed input/output widths and their published parameter counts."""
    name: str
    description: str
    n_in: int
    n_out: int
    rows: List[SuiteRow]


def _suite(name: str, description: str, n_in: int, n_out: int, rows: List[Tuple[str, int]]) -> StructureSuite:
    return StructureSuite(
        name=name, description=description, n_in=n_in, n_out=n_out,
        rows=[SuiteRow(model=model, params=count) for model, count in rows],
    )


STRUCTURE_SUITES: Dict[str, StructureSuite] = {
    suite.name: suite for suite in (
        _suite("mnist-raw", "20-d image features, 10 classes, no normalization", 20, 10, [
            ("ratio:[2/2,8]", 762),
            ("ratio:[2/2,16]", 1514),
            ("ratio:[2/2,32]", 3018),
            ("mlp:[32,relu],[32,relu]", 2058),
            ("mlp:[64,relu],[64,relu]", 6154),
            ("mlp:[64,sigmoid],[64,sigmoid]", 6154),
            ("mlp:[64,tanh],[64,tanh]", 6154),
            ("rbf:16", 506),
            ("rbf:32", 1002),
        ]),
        _suite("mnist-minmax", "20-d image features, 10 classes, min-max normalized", 20, 10, [
            ("ratio:[2/2,8]", 762),
            ("ratio:[4/2,8]", 1098),
            ("ratio:[3/3,16]", 2186),
            ("ratio:[3/3,32]", 4362),
            ("ratio:[3/3,64]", 8714),
            ("ratio:[4/2,128]", 17418),
            ("mlp:[64,tanh]", 1994),
            ("mlp:[64,swish]", 1994),
            ("mlp:[64,sigmoid]", 1994),
            ("mlp:[32,relu],[32,relu]", 2058),
            ("mlp:[64,tanh],[64,tanh]", 6154),
            ("mlp:[64,tanh],[64,tanh],[64,tanh]", 10314),
            ("mlp:[64,sigmoid],[64,sigmoid]", 6154),
            ("mlp:[64,swish],[64,swish]", 6154),
            ("rbf:16", 506),
            ("rbf:32", 1002),
            ("rbf:64", 1994),
        ]),
        _suite("imdb", "384-d text features, binary sentiment", 384, 2, [
            ("ratio:[2/2,32]", 49346),
            ("ratio:[2/2,64]", 98690),
            ("ratio:[2/2,128]", 197378),
            ("mlp:[128,relu],[128,relu]", 66050),
            ("mlp:[256,relu],[256,relu]", 164866),
            ("mlp:[512,relu],[512,relu]", 460802),
        ]),
    )
}


def get_suite(name: str) -> StructureSuite:
    try:
        return STRUCTURE_SUITES[name]
    except KeyError:
        raise ConfigError(f"Unknown suite '{name}'. Available suites: {sorted(STRUCTURE_SUITES)}")
