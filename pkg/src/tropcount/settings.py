import dataclasses
import fractions
import json
import os
import pathlib
import typing

import cattrs

from .commontypes import OutputFormat
from .rationals import format_rational, parse_rational

JOBS_ENVIRONMENT_VARIABLE = "TROPCOUNT_JOBS"
DEFAULT_SVG_UNIT = 40
DEFAULT_MAX_RESAMPLES = 8
DEFAULT_MAX_SAFE_DEGREE = 4
DEFAULT_MAX_SAFE_COVER_DEGREE = 5
DEFAULT_COORDINATE_RANGE = 10**9


def rational(value: fractions.Fraction | int | str) -> fractions.Fraction:
    if isinstance(value, fractions.Fraction):
        return value
    if isinstance(value, int):
        return fractions.Fraction(value)
    return parse_rational(value)


settings_converter = cattrs.Converter()
settings_converter.register_unstructure_hook(fractions.Fraction, format_rational)
settings_converter.register_structure_hook(fractions.Fraction, lambda v, _: rational(v))
settings_converter.register_unstructure_hook(OutputFormat, lambda f: f.value)
settings_converter.register_structure_hook(OutputFormat, lambda v, _: OutputFormat(v))
settings_converter.register_unstructure_hook(pathlib.Path, str)
settings_converter.register_structure_hook(pathlib.Path, lambda v, _: pathlib.Path(v))


@dataclasses.dataclass(kw_only=True)
class Settings:
    _path: typing.Optional[pathlib.Path] = None
    seed: int = 0
    jobs: int = 1
    format: OutputFormat = OutputFormat.TEXT
    out: typing.Optional[pathlib.Path] = None
    max_resamples: int = DEFAULT_MAX_RESAMPLES
    svg_unit: int = DEFAULT_SVG_UNIT
    # length in lattice units of a leg drawn as an arrow
    svg_leg_length: fractions.Fraction = fractions.Fraction(1)
    # highest degrees severi and hurwitz run without --unsafe
    max_safe_degree: int = DEFAULT_MAX_SAFE_DEGREE
    max_safe_cover_degree: int = DEFAULT_MAX_SAFE_COVER_DEGREE
    coordinate_range: int = DEFAULT_COORDINATE_RANGE

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")
        if self.max_resamples < 1:
            raise ValueError(f"max_resamples must be at least 1, got {self.max_resamples}")
        if self.svg_unit <= 0 or self.svg_leg_length <= 0:
            raise ValueError("SVG unit and leg length must be positive")

    def save(self, dest: typing.Optional[pathlib.Path] = None):
        if dest is None:
            dest = self._path
        if dest is None:
            raise ValueError("these settings were not loaded from a file; give a destination")
        raw = settings_converter.unstructure(self)
        del raw["_path"]
        with dest.open("w") as f:
            json.dump(raw, f, indent=2)

    @classmethod
    def load(cls, src: pathlib.Path, base: typing.Optional["Settings"] = None):
        """Read settings from a JSON file; keys missing from the file keep their values from `base`."""
        with src.open() as f:
            raw = json.load(f)
        if not isinstance(raw, dict):
            raise ValueError(f"{src} does not hold a JSON object")
        merged = settings_converter.unstructure(base if base is not None else cls())
        merged.update(raw)
        merged["_path"] = str(src)
        return settings_converter.structure(merged, cls)

    @classmethod
    def from_environment(cls, environ: typing.Optional[typing.Mapping[str, str]] = None):
        environ = os.environ if environ is None else environ
        raw = {}
        if JOBS_ENVIRONMENT_VARIABLE in environ:
            raw["jobs"] = int(environ[JOBS_ENVIRONMENT_VARIABLE])
        return settings_converter.structure(raw, cls)

    def with_overrides(self, **overrides):
        """A copy with every override that is not None applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def for_test(cls):
        return settings_converter.structure(
            {
                "seed": 0,
                "jobs": 1,
                "format": "json-lines",
                "max_resamples": 4,
                "svg_unit": 40,
                "svg_leg_length": "1",
                "max_safe_degree": 4,
                "max_safe_cover_degree": 5,
                "coordinate_range": 10**6,
            },
            cls,
        )


settings_converter.register_structure_hook(Settings, cattrs.gen.make_dict_structure_fn(Settings, settings_converter))
