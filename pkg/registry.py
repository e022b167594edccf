from constants import RELAXATION_NOT_FOUND_MSG

RELAXATION_REGISTRY = {}


# Define decorator for registering relaxation strategies
def register_relaxation(relaxation_name=""):
    def decorator(cls):
        if relaxation_name not in RELAXATION_REGISTRY:
            RELAXATION_REGISTRY[relaxation_name] = cls
        else:
            raise AssertionError(
                f"Relaxation {RELAXATION_REGISTRY[relaxation_name]} is already registered."
            )
        return cls

    return decorator


def get_relaxation(relaxation_name):
    """Instantiate a registered strategy; instances pass through unchanged."""
    if not isinstance(relaxation_name, str):
        return relaxation_name
    if relaxation_name not in RELAXATION_REGISTRY:
        raise ValueError(f"Relaxation '{relaxation_name}' is not registered. {RELAXATION_NOT_FOUND_MSG}")
    return RELAXATION_REGISTRY[relaxation_name]()
