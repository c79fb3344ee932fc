from functools import wraps

from hadronvqe.errors import ParameterError


def requires_even_sites(func):
    """A decorator for checking that the first argument
    of the decorated function is a valid, even site count

    Example:
    ```
        @requires_even_sites
        def build_mass_term(n_sites: int) -> PauliSum:
            ...

        build_mass_term(3)  # raises ParameterError
    ```
    """

    @wraps(func)
    def wrapper(n_sites, *args, **kwargs):
        if isinstance(n_sites, bool) or not isinstance(n_sites, int) or n_sites < 2 or n_sites % 2:
            raise ParameterError(f"the number of sites must be an even integer >= 2, got {n_sites!r}")
        return func(n_sites, *args, **kwargs)
    return wrapper
