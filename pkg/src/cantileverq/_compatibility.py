"""Optional imports and version-dependent behavior."""

import numpy
import packaging.version
import yaml

# NumPy 2.0 made copy=False strict, None now means "copy only if needed".
# See https://github.com/scipy/scipy/pull/20172
if packaging.version.Version(numpy.__version__) >= packaging.version.Version("2.0.0"):
    numpy_copy_if_needed = None
else:
    numpy_copy_if_needed = False

# libyaml bindings are optional; both loaders report marks for parse errors
yaml_safe_loader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)

# zstd compression of sweep files
try:
    import pyzstd
except ModuleNotFoundError:
    pyzstd = None
    pyzstd_version = None
else:
    pyzstd_version = packaging.version.Version(pyzstd.__version__)
