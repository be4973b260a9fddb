import hypothesis

# Quadrature-heavy properties can exceed hypothesis' default deadline on
# slow machines; determinism matters more than wall-clock here.
hypothesis.settings.register_profile(
    "ultrapulse", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("ultrapulse")
