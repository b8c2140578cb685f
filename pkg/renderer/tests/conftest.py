import pytest

pytest.importorskip("cvqec_render",
                    reason="renderer package not installed (pip install -e renderer)")
