#include "textscape/api.hpp"

namespace textscape {
namespace {

constexpr const char* kDocument = R"json({
  "openapi": "3.0.3",
  "info": {"title": "textscape engine", "version": "1.0.0"},
  "paths": {
    "/api/datasets": {
      "get": {
        "operationId": "listDatasets",
        "parameters": [],
        "responses": {
          "200": {"description": "Loaded datasets", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/DatasetsPayload"}}}}
        }
      }
    },
    "/api/datasets/{id}/points": {
      "get": {
        "operationId": "points",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"$ref": "#/components/parameters/errors_only"},
          {"$ref": "#/components/parameters/conf_lo"},
          {"$ref": "#/components/parameters/conf_hi"},
          {"$ref": "#/components/parameters/labels"}
        ],
        "responses": {
          "200": {"description": "Projected points", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/PointsPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/local-words": {
      "get": {
        "operationId": "localWords",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"name": "freq", "in": "query", "schema": {"type": "integer", "minimum": 0, "default": 20}},
          {"name": "locality", "in": "query", "schema": {"type": "number", "minimum": 0, "default": 0.5}},
          {"name": "quantile", "in": "query", "schema": {"type": "number", "exclusiveMinimum": 0, "maximum": 1, "default": 0.8}},
          {"name": "mode", "in": "query", "schema": {"type": "string", "enum": ["words", "concepts"], "default": "words"}},
          {"$ref": "#/components/parameters/stopwords"},
          {"name": "concept_freq", "in": "query", "schema": {"type": "integer", "minimum": 0}},
          {"name": "concept_locality", "in": "query", "schema": {"type": "number", "minimum": 0}},
          {"$ref": "#/components/parameters/region"},
          {"$ref": "#/components/parameters/errors_only"},
          {"$ref": "#/components/parameters/conf_lo"},
          {"$ref": "#/components/parameters/conf_hi"},
          {"$ref": "#/components/parameters/labels"}
        ],
        "responses": {
          "200": {"description": "Local words or concepts", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/LocalWordsPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/lists": {
      "get": {
        "operationId": "lists",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"name": "limit", "in": "query", "schema": {"type": "integer", "minimum": 0, "default": 50}},
          {"$ref": "#/components/parameters/stopwords"},
          {"$ref": "#/components/parameters/region"},
          {"$ref": "#/components/parameters/errors_only"},
          {"$ref": "#/components/parameters/conf_lo"},
          {"$ref": "#/components/parameters/conf_hi"},
          {"$ref": "#/components/parameters/labels"}
        ],
        "responses": {
          "200": {"description": "Ranked words, concepts and labels", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ListsPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/confusions": {
      "get": {
        "operationId": "confusions",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"name": "sort", "in": "query", "schema": {"type": "string", "enum": ["freq", "frequency", "gold", "pred"], "default": "freq"}},
          {"name": "secondary", "in": "query", "schema": {"type": "string", "enum": ["freq", "frequency", "gold", "pred"]}},
          {"$ref": "#/components/parameters/conf_lo"},
          {"$ref": "#/components/parameters/conf_hi"}
        ],
        "responses": {
          "200": {"description": "Confusion table and error shares", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ConfusionsPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/label-clusters": {
      "get": {
        "operationId": "labelClusters",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"name": "cut", "in": "query", "schema": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 2, "default": 0.5}}
        ],
        "responses": {
          "200": {"description": "Label clusters", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/LabelClustersPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/hulls": {
      "get": {
        "operationId": "hulls",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"$ref": "#/components/parameters/labels"}
        ],
        "responses": {
          "200": {"description": "Convex hull per gold label", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/HullsPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/api/datasets/{id}/samples/{sid}/explanation": {
      "get": {
        "operationId": "explanation",
        "parameters": [
          {"$ref": "#/components/parameters/id"},
          {"name": "sid", "in": "path", "required": true, "schema": {"type": "string"}},
          {"name": "contrast_label", "in": "query", "schema": {"type": "string"}},
          {"name": "tau", "in": "query", "schema": {"type": "number", "minimum": -1, "maximum": 1, "default": 0.4}},
          {"name": "metrics", "in": "query", "description": "Comma-separated metric names in stacking order", "schema": {"type": "string"}}
        ],
        "responses": {
          "200": {"description": "Sample explanation", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ExplanationPayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"},
          "422": {"$ref": "#/components/responses/Unprocessable"}
        }
      }
    },
    "/api/compare": {
      "post": {
        "operationId": "compare",
        "parameters": [],
        "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/CompareRequest"}}}},
        "responses": {
          "200": {"description": "Divergence of two groups", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ComparePayload"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "404": {"$ref": "#/components/responses/NotFound"},
          "422": {"$ref": "#/components/responses/Unprocessable"}
        }
      }
    },
    "/api/admin/datasets": {
      "post": {
        "operationId": "loadDataset",
        "parameters": [],
        "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/LoadRequest"}}}},
        "responses": {
          "201": {"description": "Dataset loaded", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/DatasetSummary"}}}},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "409": {"$ref": "#/components/responses/Conflict"},
          "500": {"$ref": "#/components/responses/ServerError"}
        }
      }
    }
  },
  "components": {
    "parameters": {
      "id": {"name": "id", "in": "path", "required": true, "schema": {"type": "string"}},
      "errors_only": {"name": "errors_only", "in": "query", "schema": {"type": "boolean", "default": false}},
      "conf_lo": {"name": "conf_lo", "in": "query", "schema": {"type": "number", "minimum": 0, "maximum": 1}},
      "conf_hi": {"name": "conf_hi", "in": "query", "schema": {"type": "number", "minimum": 0, "maximum": 1}},
      "labels": {"name": "labels", "in": "query", "description": "Comma-separated labels", "schema": {"type": "string"}},
      "stopwords": {"name": "stopwords", "in": "query", "schema": {"type": "string", "enum": ["ignore", "keep"], "default": "ignore"}},
      "region": {"name": "region", "in": "query", "description": "Flat comma-separated coordinates: two corners for a rectangle, three or more vertices for a lasso polygon", "schema": {"type": "string"}}
    },
    "responses": {
      "BadRequest": {
        "description": "Validation error",
        "x-error-codes": ["invalid_format", "empty_corpus", "token_count_mismatch", "duplicate_id", "non_finite_value", "invalid_argument", "invalid_region", "unknown_label", "unknown_metric"],
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "NotFound": {
        "description": "Unknown dataset, sample or route",
        "x-error-codes": ["dataset_not_found", "sample_not_found", "route_not_found"],
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "Unprocessable": {
        "description": "Valid request without a result",
        "x-error-codes": ["no_candidate", "empty_group", "degenerate_input"],
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "Conflict": {
        "description": "Dataset id already loaded",
        "x-error-codes": ["dataset_exists"],
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "ServerError": {
        "description": "I/O failure",
        "x-error-codes": ["io_error"],
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      }
    },
    "schemas": {
      "Error": {
        "type": "object",
        "required": ["error"],
        "properties": {
          "error": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {"code": {"type": "string"}, "message": {"type": "string"}}
          }
        }
      },
      "Band": {
        "type": ["object", "null"],
        "required": ["lo", "hi"],
        "properties": {"lo": {"type": "number"}, "hi": {"type": "number"}}
      },
      "Filter": {
        "type": "object",
        "required": ["errors_only", "confidence", "labels"],
        "properties": {
          "errors_only": {"type": "boolean"},
          "confidence": {"$ref": "#/components/schemas/Band"},
          "labels": {"type": ["array", "null"], "items": {"type": "string"}}
        }
      },
      "Region": {
        "type": ["object", "null"],
        "required": ["kind", "coordinates"],
        "properties": {
          "kind": {"type": "string", "enum": ["rect", "lasso"]},
          "coordinates": {"type": "array", "items": {"type": "number"}}
        }
      },
      "DatasetSummary": {
        "type": "object",
        "required": ["id", "sample_count", "label_count", "dim", "layout_id", "has_lexicon", "warnings"],
        "properties": {
          "id": {"type": "string"},
          "sample_count": {"type": "integer", "minimum": 1},
          "label_count": {"type": "integer", "minimum": 1},
          "dim": {"type": "integer", "minimum": 1},
          "layout_id": {"type": "string"},
          "has_lexicon": {"type": "boolean"},
          "warnings": {"type": "array", "items": {"type": "string"}}
        }
      },
      "DatasetsPayload": {
        "type": "object",
        "required": ["datasets"],
        "properties": {"datasets": {"type": "array", "items": {"$ref": "#/components/schemas/DatasetSummary"}}}
      },
      "PointsPayload": {
        "type": "object",
        "required": ["dataset", "layout_id", "filter", "points"],
        "properties": {
          "dataset": {"type": "string"},
          "layout_id": {"type": "string"},
          "filter": {"$ref": "#/components/schemas/Filter"},
          "points": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["id", "x", "y", "gold", "pred", "confidence", "correct", "color_index"],
              "properties": {
                "id": {"type": "string"},
                "x": {"type": "number"},
                "y": {"type": "number"},
                "gold": {"type": "string"},
                "pred": {"type": "string"},
                "confidence": {"type": "number", "minimum": 0, "maximum": 1},
                "correct": {"type": "boolean"},
                "color_index": {"type": "integer", "minimum": 0}
              }
            }
          }
        }
      },
      "LocalWordsPayload": {
        "type": "object",
        "required": ["dataset", "layout_id", "params", "filter", "region", "sample_count", "words"],
        "properties": {
          "dataset": {"type": "string"},
          "layout_id": {"type": "string"},
          "params": {
            "type": "object",
            "required": ["freq", "locality", "quantile", "stopwords", "mode"],
            "properties": {
              "freq": {"type": "integer"},
              "locality": {"type": "number"},
              "quantile": {"type": "number"},
              "stopwords": {"type": "string", "enum": ["ignore", "keep"]},
              "mode": {"type": "string", "enum": ["words", "concepts"]},
              "concept_freq": {"type": "integer"},
              "concept_locality": {"type": "number"}
            }
          },
          "filter": {"$ref": "#/components/schemas/Filter"},
          "region": {"$ref": "#/components/schemas/Region"},
          "sample_count": {"type": "integer", "minimum": 0},
          "words": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["word", "x", "y", "frequency", "locality", "scale_hint"],
              "properties": {
                "word": {"type": "string"},
                "x": {"type": "number"},
                "y": {"type": "number"},
                "frequency": {"type": "integer", "minimum": 1},
                "locality": {"type": "number", "minimum": 0},
                "scale_hint": {"type": "number", "minimum": 0}
              }
            }
          }
        }
      },
      "RankedItem": {
        "type": "object",
        "required": ["item", "count", "share"],
        "properties": {
          "item": {"type": "string"},
          "count": {"type": "integer", "minimum": 1},
          "share": {"type": "number", "minimum": 0, "maximum": 1}
        }
      },
      "ListsPayload": {
        "type": "object",
        "required": ["dataset", "filter", "region", "sample_count", "words", "concepts", "labels"],
        "properties": {
          "dataset": {"type": "string"},
          "filter": {"$ref": "#/components/schemas/Filter"},
          "region": {"$ref": "#/components/schemas/Region"},
          "sample_count": {"type": "integer", "minimum": 0},
          "words": {"type": "array", "items": {"$ref": "#/components/schemas/RankedItem"}},
          "concepts": {"type": "array", "items": {"$ref": "#/components/schemas/RankedItem"}},
          "labels": {"type": "array", "items": {"$ref": "#/components/schemas/RankedItem"}}
        }
      },
      "LabelShare": {
        "type": "object",
        "required": ["label", "count", "share"],
        "properties": {
          "label": {"type": "string"},
          "count": {"type": "integer", "minimum": 0},
          "share": {"type": "number", "minimum": 0, "maximum": 1}
        }
      },
      "ConfusionsPayload": {
        "type": "object",
        "required": ["dataset", "sort", "secondary", "confidence", "entries", "error_shares"],
        "properties": {
          "dataset": {"type": "string"},
          "sort": {"type": "string"},
          "secondary": {"type": ["string", "null"]},
          "confidence": {"$ref": "#/components/schemas/Band"},
          "entries": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["gold", "pred", "frequency", "sample_ids"],
              "properties": {
                "gold": {"type": "string"},
                "pred": {"type": "string"},
                "frequency": {"type": "integer", "minimum": 1},
                "sample_ids": {"type": "array", "items": {"type": "string"}}
              }
            }
          },
          "error_shares": {
            "type": "object",
            "required": ["has_errors", "total_errors", "false_negatives", "false_positives"],
            "properties": {
              "has_errors": {"type": "boolean"},
              "total_errors": {"type": "integer", "minimum": 0},
              "false_negatives": {"type": "array", "items": {"$ref": "#/components/schemas/LabelShare"}},
              "false_positives": {"type": "array", "items": {"$ref": "#/components/schemas/LabelShare"}}
            }
          }
        }
      },
      "LabelClustersPayload": {
        "type": "object",
        "required": ["dataset", "cut", "clusters"],
        "properties": {
          "dataset": {"type": "string"},
          "cut": {"type": "number"},
          "clusters": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["id", "members", "color_index", "color"],
              "properties": {
                "id": {"type": "integer", "minimum": 0},
                "members": {"type": "array", "items": {"type": "string"}},
                "color_index": {"type": "integer", "minimum": 0},
                "color": {"type": "string"}
              }
            }
          }
        }
      },
      "HullsPayload": {
        "type": "object",
        "required": ["dataset", "layout_id", "hulls"],
        "properties": {
          "dataset": {"type": "string"},
          "layout_id": {"type": "string"},
          "hulls": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["label", "sample_count", "color_index", "color", "vertices"],
              "properties": {
                "label": {"type": "string"},
                "sample_count": {"type": "integer", "minimum": 0},
                "color_index": {"type": "integer", "minimum": 0},
                "color": {"type": "string"},
                "vertices": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
              }
            }
          }
        }
      },
      "Contribution": {
        "type": "object",
        "required": ["similarity", "query", "other"],
        "properties": {
          "similarity": {"type": "number"},
          "query": {"type": "array", "items": {"type": "number"}},
          "other": {"type": "array", "items": {"type": "number"}}
        }
      },
      "ExplanationPayload": {
        "type": "object",
        "required": ["dataset", "sample_id", "tokens", "importance", "triple", "tau", "columns", "edges", "contributions", "summary"],
        "properties": {
          "dataset": {"type": "string"},
          "sample_id": {"type": "string"},
          "tokens": {"type": "array", "items": {"type": "string"}},
          "importance": {
            "type": "object",
            "required": ["metrics", "scores", "totals"],
            "properties": {
              "metrics": {"type": "array", "items": {"type": "string"}},
              "scores": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": "number", "minimum": 0}}},
              "totals": {"type": "array", "items": {"type": "number"}}
            }
          },
          "triple": {
            "type": "object",
            "required": ["query_id", "closest_id", "contrast_id", "contrast_label", "predicted_label", "gold_label"],
            "properties": {
              "query_id": {"type": "string"},
              "closest_id": {"type": "string"},
              "contrast_id": {"type": "string"},
              "contrast_label": {"type": "string"},
              "predicted_label": {"type": "string"},
              "gold_label": {"type": "string"}
            }
          },
          "tau": {"type": "number"},
          "columns": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["role", "sample_id", "gold", "pred", "tokens"],
              "properties": {
                "role": {"type": "string", "enum": ["query", "closest", "contrast"]},
                "sample_id": {"type": "string"},
                "gold": {"type": "string"},
                "pred": {"type": "string"},
                "tokens": {"type": "array", "items": {"type": "string"}}
              }
            }
          },
          "edges": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["pair", "query_token", "other_token", "weight"],
              "properties": {
                "pair": {"type": "string", "enum": ["closest", "contrast"]},
                "query_token": {"type": "integer", "minimum": 0},
                "other_token": {"type": "integer", "minimum": 0},
                "weight": {"type": "number", "minimum": -1, "maximum": 1}
              }
            }
          },
          "contributions": {
            "type": "object",
            "required": ["closest", "contrast"],
            "properties": {
              "closest": {"$ref": "#/components/schemas/Contribution"},
              "contrast": {"$ref": "#/components/schemas/Contribution"}
            }
          },
          "summary": {
            "type": "object",
            "required": ["text", "supporting_tokens", "confounders"],
            "properties": {
              "text": {"type": "string"},
              "supporting_tokens": {"type": "array", "items": {"type": "string"}},
              "confounders": {"type": "array", "items": {"type": "string"}}
            }
          }
        }
      },
      "GroupSelector": {
        "type": "object",
        "required": ["dataset"],
        "properties": {
          "dataset": {"type": "string"},
          "gold_labels": {"type": "array", "items": {"type": "string"}},
          "pred_labels": {"type": "array", "items": {"type": "string"}},
          "region": {"type": "array", "items": {"type": "number"}},
          "error_status": {"type": "string", "enum": ["errors", "correct", "all"]},
          "confidence": {"type": "array", "items": {"type": "number"}}
        }
      },
      "CompareRequest": {
        "type": "object",
        "required": ["side_a", "side_b"],
        "properties": {
          "side_a": {"$ref": "#/components/schemas/GroupSelector"},
          "side_b": {"$ref": "#/components/schemas/GroupSelector"},
          "item_kind": {"type": "string", "enum": ["word", "concept", "label", "gold_label"], "default": "word"},
          "stopwords": {"type": "string", "enum": ["ignore", "keep"], "default": "ignore"}
        }
      },
      "CompareSide": {
        "type": "object",
        "required": ["descriptor", "layout_id", "sample_count", "points"],
        "properties": {
          "descriptor": {"$ref": "#/components/schemas/GroupSelector"},
          "layout_id": {"type": "string"},
          "sample_count": {"type": "integer", "minimum": 1},
          "points": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["id", "x", "y"],
              "properties": {"id": {"type": "string"}, "x": {"type": "number"}, "y": {"type": "number"}}
            }
          }
        }
      },
      "ComparePayload": {
        "type": "object",
        "required": ["item_kind", "stopwords", "statistic", "side_a", "side_b", "items"],
        "properties": {
          "item_kind": {"type": "string"},
          "stopwords": {"type": "string"},
          "statistic": {
            "type": "object",
            "required": ["name", "prior_total", "z_crit"],
            "properties": {"name": {"type": "string"}, "prior_total": {"type": "number"}, "z_crit": {"type": "number"}}
          },
          "side_a": {"$ref": "#/components/schemas/CompareSide"},
          "side_b": {"$ref": "#/components/schemas/CompareSide"},
          "items": {
            "type": "array",
            "items": {
              "type": "object",
              "required": ["item", "kind", "count_a", "count_b", "z", "verdict"],
              "properties": {
                "item": {"type": "string"},
                "kind": {"type": "string", "enum": ["word", "concept", "label", "gold_label"]},
                "count_a": {"type": "integer", "minimum": 0},
                "count_b": {"type": "integer", "minimum": 0},
                "z": {"type": "number"},
                "verdict": {"type": "string", "enum": ["shared", "a_side", "b_side"]}
              }
            }
          }
        }
      },
      "LoadRequest": {
        "type": "object",
        "description": "Either {store} naming a store directory, or manifest fields with paths relative to the server's working directory",
        "properties": {
          "store": {"type": "string"},
          "id": {"type": "string"},
          "corpus": {"type": "string"},
          "token_embeddings": {"type": "string"},
          "sample_embeddings": {"type": ["string", "null"]},
          "lexicon": {"type": ["string", "null"]},
          "importance": {"type": ["string", "null"]},
          "stopwords": {"type": ["string", "null"]},
          "seed": {"type": "integer", "minimum": 0},
          "projection": {"type": "object"}
        }
      }
    }
  }
})json";

}  // namespace

nlohmann::json openapi_document() {
  static const nlohmann::json document = nlohmann::json::parse(kDocument);
  return document;
}

}  // namespace textscape
