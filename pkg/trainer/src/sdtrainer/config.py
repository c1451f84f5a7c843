"""Training configuration and the plain-text key=value config format."""

from dataclasses import dataclass, field, fields


@dataclass
class TrainConfig:
    image_dir: str = ""
    output: str = "model.lsdw"
    tau_set: tuple = tuple(range(1, 9))
    patch_size: int = 128
    patch_stride: int = 32
    epochs_main: int = 10  # desk-scale stand-in for the full 100-epoch stage
    epochs_tail: int = 5
    lr_main: float = 1e-4
    lr_tail: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    lam: float = 0.2
    grad_clip: float = 5.0  # global gradient-norm cap; 0 disables
    batch_size: int = 16
    num_blocks: int = 8
    base_channels: int = 64
    dilation: int = 2
    seed: int = 0
    codec_cmd: str = "nlcodec"
    holdout: tuple = field(default_factory=tuple)  # reserved for callers

    def __post_init__(self):
        self.tau_set = tuple(int(t) for t in self.tau_set)
        if not self.tau_set or not all(1 <= t <= 8 for t in self.tau_set):
            raise ValueError(f"tau_set must be a nonempty subset of 1..8, got {self.tau_set}")
        if self.patch_size % 2 != 0:
            raise ValueError("patch_size must be even (one down/up level)")
        if self.patch_stride < 1 or self.batch_size < 1:
            raise ValueError("patch_stride and batch_size must be positive")
        if min(self.epochs_main, self.epochs_tail) < 0:
            raise ValueError("epoch counts must be >= 0")


_INT_KEYS = {
    "patch_size", "patch_stride", "epochs_main", "epochs_tail",
    "batch_size", "num_blocks", "base_channels", "dilation", "seed",
}
_FLOAT_KEYS = {"lr_main", "lr_tail", "beta1", "beta2", "lam", "grad_clip"}
_STR_KEYS = {"image_dir", "output", "codec_cmd"}


def parse_config(text: str) -> TrainConfig:
    """Parse key=value lines (# starts a comment) into a TrainConfig."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in _INT_KEYS:
            values[key] = int(value)
        elif key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _STR_KEYS:
            values[key] = value
        elif key == "tau_set":
            values[key] = tuple(int(v) for v in value.split(",") if v.strip())
        else:
            known = sorted(_INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"tau_set"})
            raise ValueError(f"line {lineno}: unknown key {key!r} (known: {', '.join(known)})")
    return TrainConfig(**values)


def load_config(path) -> TrainConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_field_names():
    return [f.name for f in fields(TrainConfig)]
