import csv
import io
import json
import math
import os

from flask import current_app, has_app_context
from werkzeug.utils import secure_filename

from utils.errors import InvalidArgumentError

UNDEFINED = 'undefined'


class OutputWriter:
    """Serializes curve series and result objects to CSV, JSON and gnuplot files"""

    def __init__(self):
        self.output_folder = None
        self.significant_digits = 12
        self.tool_version = None

    def init_app(self, app):
        """Initialize with Flask app"""
        self.output_folder = app.config.get('OUTPUT_FOLDER', 'output')
        self.significant_digits = app.config.get('CSV_SIGNIFICANT_DIGITS', 12)
        self.tool_version = app.config.get('TOOL_VERSION')

    def get_output_folder(self):
        if self.output_folder is None:
            self.output_folder = 'output'
        return self.output_folder

    def format_value(self, value):
        """Fixed textual form of one cell"""
        if value is None:
            return UNDEFINED
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            if math.isnan(value):
                return UNDEFINED
            if math.isinf(value):
                return 'inf' if value > 0 else '-inf'
            return f'{value:.{self.significant_digits}g}'
        return str(value)

    def _metadata_lines(self, metadata):
        lines = []
        if self.tool_version and 'tool_version' not in metadata:
            metadata = dict(metadata, tool_version=self.tool_version)
        for key in sorted(metadata):
            value = metadata[key]
            if isinstance(value, (dict, list, tuple)):
                text = json.dumps(self.sanitize(value), sort_keys=True)
            else:
                text = self.format_value(value)
            lines.append(f'# {key}={text}\n')
        return lines

    def render_csv(self, series):
        """
        CSV text of a curve series

        Metadata comes first as '#'-prefixed key=value lines, then the header
        row with units in brackets, then the data rows. Lines end in LF.
        """
        buffer = io.StringIO(newline='')
        buffer.writelines(self._metadata_lines(series.metadata))
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow([f'{name} [{unit}]' if unit else name for name, unit in series.columns])
        for row in series.rows:
            writer.writerow([self.format_value(v) for v in row])
        return buffer.getvalue()

    def sanitize(self, value):
        if isinstance(value, float) and not math.isfinite(value):
            return None if math.isnan(value) else self.format_value(value)
        if isinstance(value, dict):
            return {str(k): self.sanitize(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self.sanitize(v) for v in value]
        return value

    def render_json(self, payload):
        if hasattr(payload, 'to_dict'):
            payload = payload.to_dict()
        return json.dumps(self.sanitize(payload), indent=2) + '\n'

    def render_gnuplot(self, series, data_filename, y_columns, group_column='scheme'):
        """
        gnuplot script plotting against the first column

        One curve per distinct value of group_column when the series has it,
        otherwise one curve per requested y column.
        """
        names = series.column_names
        if isinstance(y_columns, str):
            y_columns = [y_columns]
        missing = [c for c in y_columns if c not in names]
        if missing:
            raise InvalidArgumentError(f'Series {series.figure_id} has no column(s) {missing}')
        y_column = y_columns[0]
        x_idx = 1
        y_idx = names.index(y_column) + 1
        x_name, x_unit = series.columns[0]
        y_unit = series.columns[y_idx - 1][1]

        lines = [
            f'# {series.figure_id}\n',
            "set datafile separator ','\n",
            "set datafile commentschars '#'\n",
            'set key autotitle columnhead\n',
            f"set xlabel '{x_name}{f' [{x_unit}]' if x_unit else ''}'\n",
            f"set ylabel '{y_column}{f' [{y_unit}]' if y_unit else ''}'\n",
        ]
        if series.metadata.get('log_x'):
            lines.append('set logscale x\n')

        if group_column in names:
            g_idx = names.index(group_column) + 1
            groups = []
            for value in series.column(group_column):
                if value not in groups:
                    groups.append(value)
            curves = [
                f"'{data_filename}' using {x_idx}:(strcol({g_idx}) eq '{label}' ? ${y_idx} : 1/0) "
                f"with lines title '{group_column}={label}'"
                for label in (self.format_value(g) for g in groups)
            ]
        else:
            curves = [
                f"'{data_filename}' using {x_idx}:{names.index(column) + 1} with lines title '{column}'"
                for column in y_columns
            ]
        lines.append('plot ' + ', \\\n     '.join(curves) + '\n')
        return ''.join(lines)

    def resolve_path(self, filename, out=None):
        """Explicit output path, or a sanitized filename inside the output folder"""
        if out:
            return out
        safe_name = secure_filename(filename)
        if not safe_name:
            raise InvalidArgumentError(f'Invalid output filename {filename!r}')
        return os.path.join(self.get_output_folder(), safe_name)

    def write_text(self, filename, text, out=None):
        """
        Write text to a file

        Returns:
            dict: Write result with the file path and size
        """
        result = {
            'success': False,
            'file_path': None,
            'bytes': 0,
            'error': None
        }
        path = self.resolve_path(filename, out)
        try:
            directory = os.path.dirname(path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            result.update(success=True, file_path=path, bytes=len(text.encode('utf-8')))
            if has_app_context():
                current_app.logger.info(f'Wrote {path}')
        except OSError as e:
            result['error'] = str(e)
            if has_app_context():
                current_app.logger.error(f'Failed to write {path}: {e}')
        return result

    def write_series(self, series, out=None, output_format='csv'):
        extension = 'json' if output_format == 'json' else 'csv'
        text = self.render_json(series) if output_format == 'json' else self.render_csv(series)
        return self.write_text(f'{series.figure_id}.{extension}', text, out)


# Global output writer instance
output_writer = OutputWriter()
