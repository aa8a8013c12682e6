import inspect

COMMANDS = {}


def when(command, help=""):
    """
    Decorates a function and registers it as the handler of a CLI subcommand.
    The handler might or not take the run configuration as its argument.
    """

    def decorator(func):
        if command in COMMANDS:
            raise ValueError(f"Command {command!r} is already registered")

        # Function doesn't receive the configuration
        if not inspect.signature(func).parameters:

            def wrapper(config):
                return func()

        else:
            wrapper = func

        COMMANDS[command] = {"handler": wrapper, "help": help or (func.__doc__ or "").strip()}
        return func

    return decorator


def handler(command):
    try:
        return COMMANDS[command]["handler"]
    except KeyError:
        raise ValueError(
            f"Unknown command {command!r}, expected one of {sorted(COMMANDS)}"
        ) from None
