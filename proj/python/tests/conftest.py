import os
import sys

# ctest points this at the in-tree build so an editable install cannot shadow it.
_stage = os.environ.get("AHILB_PYTHON_PATH")
if _stage:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__module__ != "_editable_skbc_ahilb"]
    sys.path.insert(0, _stage)
