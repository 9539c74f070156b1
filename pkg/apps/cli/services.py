import json
from pathlib import Path
from typing import Any, Dict, List, Union

from rest_framework import serializers

from apps.casestudy.services import BUILTIN_WORKFLOW, default_scenarios, workflow_spec
from apps.reconfiguration.models import Scenario
from apps.reconfiguration.serializers import ScenarioSerializer
from apps.workflows.models import Configuration, WorkflowSpec
from apps.workflows.serializers import ConfigurationSerializer, WorkflowSpecSerializer

from .exceptions import DocumentError


class DocumentLoader:
    """
    Resuelve nombres incorporados antes que rutas y convierte los documentos JSON
    en objetos del dominio usando los serializers de cada app
    """

    @staticmethod
    def read_json(path: Union[str, Path]) -> Any:
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as exc:
            raise DocumentError(f"No se puede leer '{path}': {exc.strerror or exc}")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"{path}: JSON inválido en línea {exc.lineno}, columna {exc.colno}: {exc.msg}")

    @staticmethod
    def _deserialize(serializer: serializers.Serializer, source: str):
        if not serializer.is_valid():
            raise DocumentError(f"{source}: {DocumentLoader.describe_errors(serializer.errors)}")
        return serializer.save()

    @staticmethod
    def describe_errors(errors: Any, prefix: str = '') -> str:
        """
        Aplana los errores anidados del serializer como `campo.subcampo: mensaje`
        """
        parts: List[str] = []
        if isinstance(errors, dict):
            for key, value in errors.items():
                name = key if key != 'non_field_errors' else ''
                path = '.'.join(p for p in (prefix, str(name)) if p)
                parts.append(DocumentLoader.describe_errors(value, path))
        elif isinstance(errors, list):
            for position, value in enumerate(errors):
                if isinstance(value, (dict, list)):
                    if value:
                        parts.append(DocumentLoader.describe_errors(value, f"{prefix}[{position}]"))
                else:
                    parts.append(f"{prefix or 'document'}: {value}")
        else:
            parts.append(f"{prefix or 'document'}: {errors}")
        return '; '.join(p for p in parts if p)

    @staticmethod
    def workflow(reference: str) -> WorkflowSpec:
        if reference == BUILTIN_WORKFLOW:
            return workflow_spec()
        data = DocumentLoader.read_json(reference)
        return DocumentLoader._deserialize(WorkflowSpecSerializer(data=data), reference)

    @staticmethod
    def configurations(reference: str) -> List[Configuration]:
        """
        Para validar se acepta también un documento con una sola configuración
        """
        if reference == BUILTIN_WORKFLOW:
            spec = workflow_spec()
            return [spec.old, spec.new]
        data = DocumentLoader.read_json(reference)
        if isinstance(data, dict) and 'activities' in data:
            return [DocumentLoader._deserialize(ConfigurationSerializer(data=data), reference)]
        spec = DocumentLoader._deserialize(WorkflowSpecSerializer(data=data), reference)
        return [spec.old, spec.new]

    @staticmethod
    def scenario(reference: str) -> Scenario:
        builtins: Dict[str, Scenario] = dict(default_scenarios())
        if reference in builtins:
            return builtins[reference]
        if not Path(reference).is_file():
            raise DocumentError(
                f"Escenario desconocido '{reference}' (incorporados: {', '.join(builtins)})")
        data = DocumentLoader.read_json(reference)
        return DocumentLoader._deserialize(ScenarioSerializer(data=data), reference)
