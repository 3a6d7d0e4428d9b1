"""Features related to input and output from and to disk."""
import csv
import json

from .errors import DatasetError


def save_json(content, filename):
    """Write JSON with sorted keys so that equal content gives equal bytes.

    Parameters
    ----------
    content : dict
        JSON-serializable content.

    filename : str or Path
        Output file.
    """
    with open(filename, "w") as f:
        json.dump(content, f, sort_keys=True, indent=2)
        f.write("\n")


def load_json(filename):
    """Read a JSON file.

    Parameters
    ----------
    filename : str or Path
        Input file.

    Returns
    -------
    content : dict
        Content.

    Raises
    ------
    DatasetError
        If the file cannot be read or parsed.
    """
    try:
        with open(filename, "r") as f:
            return json.load(f)
    except OSError as e:
        raise DatasetError("Could not read '%s': %s" % (filename, e))
    except ValueError as e:
        raise DatasetError("'%s' is not valid JSON: %s" % (filename, e))


def save_curves(curves, filename):
    """Export training curves as CSV.

    Parameters
    ----------
    curves : list of dict
        One entry per epoch. All entries have the same keys.

    filename : str or Path
        Output file.
    """
    if not curves:
        raise ValueError("No training curves to export")
    with open(filename, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(curves[0].keys()))
        writer.writeheader()
        writer.writerows(curves)


def load_curves(filename):
    """Read training curves from CSV.

    Parameters
    ----------
    filename : str or Path
        CSV file written by :func:`save_curves`.

    Returns
    -------
    curves : list of dict
        One entry per epoch with float values, 'epoch' as int.
    """
    with open(filename, "r", newline="") as f:
        rows = list(csv.DictReader(f))
    return [{k: int(v) if k == "epoch" else float(v) for k, v in row.items()}
            for row in rows]


def write_json_lines(lines, filename):
    """Write one JSON document per line.

    Parameters
    ----------
    lines : iterable of dict
        Documents.

    filename : str or Path
        Output file.
    """
    with open(filename, "w") as f:
        for line in lines:
            f.write(json.dumps(line, sort_keys=True))
            f.write("\n")


def read_json_lines(filename):
    """Read a file with one JSON document per line.

    Parameters
    ----------
    filename : str or Path
        Input file.

    Returns
    -------
    lines : list of dict
        Documents.

    Raises
    ------
    DatasetError
        If a line cannot be parsed.
    """
    lines = []
    try:
        with open(filename, "r") as f:
            for i, line in enumerate(f):
                if line.strip():
                    lines.append(json.loads(line))
    except OSError as e:
        raise DatasetError("Could not read '%s': %s" % (filename, e))
    except ValueError as e:
        raise DatasetError("Line %d of '%s' is malformed: %s"
                           % (i + 1, filename, e))
    return lines
